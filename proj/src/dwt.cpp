#include "wavesel/dwt.hpp"

#include <stdexcept>
#include <string>

namespace wavesel {

namespace {

// Positive remainder; taps may wrap several times when the filter is longer
// than the current block.
inline std::size_t wrap(long idx, std::size_t len) {
    const long l = static_cast<long>(len);
    long m = idx % l;
    if (m < 0) m += l;
    return static_cast<std::size_t>(m);
}

void analyze(const std::vector<double>& c, const FilterPair& fp,
             std::vector<double>& a, std::vector<double>& d) {
    const std::size_t half = c.size() / 2;
    const int len = fp.length();
    a.assign(half, 0.0);
    d.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double sa = 0.0;
        double sd = 0.0;
        for (int i = 0; i < len; ++i) {
            sa += fp.h[static_cast<std::size_t>(i)] * c[wrap(2 * static_cast<long>(k) + i, c.size())];
            const int n = fp.g_offset + i;
            sd += fp.g[static_cast<std::size_t>(i)] * c[wrap(2 * static_cast<long>(k) + n, c.size())];
        }
        a[k] = sa;
        d[k] = sd;
    }
}

std::vector<double> synthesize(const std::vector<double>& a, const std::vector<double>& d,
                               const FilterPair& fp) {
    const std::size_t out_len = 2 * a.size();
    const int len = fp.length();
    std::vector<double> c(out_len, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (int i = 0; i < len; ++i) {
            c[wrap(2 * static_cast<long>(k) + i, out_len)] += a[k] * fp.h[static_cast<std::size_t>(i)];
            const int n = fp.g_offset + i;
            c[wrap(2 * static_cast<long>(k) + n, out_len)] += d[k] * fp.g[static_cast<std::size_t>(i)];
        }
    }
    return c;
}

int dyadic_log(std::size_t n) {
    if (n == 0) return -1;
    int j = 0;
    std::size_t v = n;
    while ((v & 1u) == 0) {
        v >>= 1;
        ++j;
    }
    return (v == 1) ? j : -1;
}

}  // namespace

CoefficientPyramid dwt(const std::vector<double>& signal, const FilterPair& fp,
                       int coarse_level) {
    const int max_level = dyadic_log(signal.size());
    if (max_level < 0) {
        throw std::invalid_argument("dwt: signal length " + std::to_string(signal.size()) +
                                    " is not a power of two");
    }
    if (coarse_level < 0 || coarse_level >= max_level) {
        throw std::invalid_argument("dwt: coarse level must satisfy 0 <= j0 < J");
    }

    CoefficientPyramid pyr;
    pyr.coarse_level = coarse_level;
    pyr.max_level = max_level;
    pyr.details.resize(static_cast<std::size_t>(max_level - coarse_level));

    std::vector<double> cur = signal;
    std::vector<double> a;
    std::vector<double> d;
    for (int j = max_level - 1; j >= coarse_level; --j) {
        analyze(cur, fp, a, d);
        pyr.details[static_cast<std::size_t>(j - coarse_level)] = d;
        cur = a;
    }
    pyr.approx = cur;
    return pyr;
}

std::vector<double> idwt(const CoefficientPyramid& pyr, const FilterPair& fp) {
    if (pyr.approx.size() != (std::size_t{1} << pyr.coarse_level)) {
        throw std::invalid_argument("idwt: approximation block size does not match j0");
    }
    std::vector<double> cur = pyr.approx;
    for (std::size_t i = 0; i < pyr.details.size(); ++i) {
        const auto& d = pyr.details[i];
        if (d.size() != cur.size()) {
            throw std::invalid_argument("idwt: level " + std::to_string(pyr.detail_level(i)) +
                                        " size mismatch");
        }
        cur = synthesize(cur, d, fp);
    }
    if (cur.size() != (std::size_t{1} << pyr.max_level)) {
        throw std::invalid_argument("idwt: pyramid does not reconstruct to 2^J samples");
    }
    return cur;
}

}  // namespace wavesel
