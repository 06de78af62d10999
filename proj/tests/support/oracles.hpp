#pragma once

// Independent reference implementations used to check the library. These are
// written directly from the defining equations, on purpose sharing no code
// with the implementations under test.

#include <cmath>
#include <cstdlib>
#include <optional>
#include <vector>

#include "xbarsim/types.hpp"

namespace oracles {

// Mid-rise quantizer with clipping factor alpha, differential (signed) range.
// out = sgn(x) * delta * (floor(min(|x|, alpha*i_max) / delta) + 1/2),
// delta = alpha * 2 * i_max / 2^B. Infinite resolution clips only.
inline double adc_ref_differential(double x, std::optional<int> bits, double alpha, double i_max) {
    const double clip = alpha * i_max;
    const double mag = std::min(std::fabs(x), clip);
    double q = mag;
    if (bits) {
        const double delta = alpha * 2.0 * i_max / std::pow(2.0, *bits);
        q = (std::floor(mag / delta) + 0.5) * delta;
    }
    if (x > 0.0)
        return q;
    if (x < 0.0)
        return -q;
    return 0.0;
}

// Single-ended variant over [0, alpha*i_max] with delta = alpha*i_max / 2^B.
inline double adc_ref_single_ended(double x, std::optional<int> bits, double alpha, double i_max) {
    const double clip = alpha * i_max;
    const double xc = std::min(std::max(x, 0.0), clip);
    if (!bits)
        return xc;
    const double delta = alpha * i_max / std::pow(2.0, *bits);
    return (std::floor(xc / delta) + 0.5) * delta;
}

// Plain integer matrix-vector product, the ground truth for every mapping.
inline std::vector<long long> int_mvm(const xbarsim::IntMatrix& w, const std::vector<int>& v) {
    std::vector<long long> r(static_cast<std::size_t>(w.rows), 0);
    for (int m = 0; m < w.rows; ++m)
        for (int i = 0; i < w.cols; ++i)
            r[static_cast<std::size_t>(m)] +=
                static_cast<long long>(w.at(m, i)) * v[static_cast<std::size_t>(i)];
    return r;
}

// Direct six-loop convolution on integer HWC data, TF-style padding.
// kernels: k_o x (k_h*k_w*k_i), row-major (kh, kw, ki).
struct ConvShape {
    int h = 0, w = 0, c = 0;
    int k_h = 1, k_w = 1, k_o = 1;
    int stride_h = 1, stride_w = 1;
    bool same_padding = false;
};

inline std::vector<long long> conv_ref(const std::vector<int>& ifm, const xbarsim::IntMatrix& k,
                                       const ConvShape& s, int& oh, int& ow) {
    int pad_top = 0, pad_left = 0;
    if (s.same_padding) {
        oh = (s.h + s.stride_h - 1) / s.stride_h;
        ow = (s.w + s.stride_w - 1) / s.stride_w;
        pad_top = std::max((oh - 1) * s.stride_h + s.k_h - s.h, 0) / 2;
        pad_left = std::max((ow - 1) * s.stride_w + s.k_w - s.w, 0) / 2;
    } else {
        oh = (s.h - s.k_h) / s.stride_h + 1;
        ow = (s.w - s.k_w) / s.stride_w + 1;
    }
    std::vector<long long> ofm(static_cast<std::size_t>(oh) * ow * s.k_o, 0);
    for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
            for (int ko = 0; ko < s.k_o; ++ko) {
                long long acc = 0;
                for (int kh = 0; kh < s.k_h; ++kh)
                    for (int kw = 0; kw < s.k_w; ++kw)
                        for (int ki = 0; ki < s.c; ++ki) {
                            const int iy = oy * s.stride_h + kh - pad_top;
                            const int ix = ox * s.stride_w + kw - pad_left;
                            if (iy < 0 || iy >= s.h || ix < 0 || ix >= s.w)
                                continue;
                            acc += static_cast<long long>(
                                       k.at(ko, (kh * s.k_w + kw) * s.c + ki)) *
                                   ifm[(static_cast<std::size_t>(iy) * s.w + ix) * s.c + ki];
                        }
                ofm[(static_cast<std::size_t>(oy) * ow + ox) * s.k_o + ko] = acc;
            }
    return ofm;
}

} // namespace oracles
