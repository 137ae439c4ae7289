// Copyright 2026 The Driftlock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AVX2/FMA variants of the estimator kernels. Compiled with -mavx2 -mfma and
// only reached through dispatch after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "driftlock/simd/kernels.hpp"

namespace driftlock::simd {

namespace {

constexpr int kNearest = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;

inline __m256d splat(double x) { return _mm256_set1_pd(x); }

// cos(2 pi u) for u in turns. Reduces to [-1/8, 1/8] turn and evaluates the
// Cephes sin/cos minimax polynomials on [-pi/4, pi/4].
inline __m256d cos_turns(__m256d u) {
    u = _mm256_sub_pd(u, _mm256_round_pd(u, kNearest));
    const __m256d q = _mm256_round_pd(_mm256_mul_pd(u, splat(4.0)), kNearest);
    const __m256d r = _mm256_fnmadd_pd(q, splat(0.25), u);
    const __m256d y = _mm256_mul_pd(r, splat(2.0 * std::numbers::pi));
    const __m256d z = _mm256_mul_pd(y, y);

    __m256d ps = splat(1.58962301576546568060e-10);
    ps = _mm256_fmadd_pd(ps, z, splat(-2.50507477628578072866e-8));
    ps = _mm256_fmadd_pd(ps, z, splat(2.75573136213857245213e-6));
    ps = _mm256_fmadd_pd(ps, z, splat(-1.98412698295895385996e-4));
    ps = _mm256_fmadd_pd(ps, z, splat(8.33333333332211858878e-3));
    ps = _mm256_fmadd_pd(ps, z, splat(-1.66666666666666307295e-1));
    const __m256d sin_y = _mm256_fmadd_pd(_mm256_mul_pd(y, z), ps, y);

    __m256d pc = splat(-1.13585365213876817300e-11);
    pc = _mm256_fmadd_pd(pc, z, splat(2.08757008419747316778e-9));
    pc = _mm256_fmadd_pd(pc, z, splat(-2.75573141792967388112e-7));
    pc = _mm256_fmadd_pd(pc, z, splat(2.48015872888517045348e-5));
    pc = _mm256_fmadd_pd(pc, z, splat(-1.38888888888730564116e-3));
    pc = _mm256_fmadd_pd(pc, z, splat(4.16666666666665929218e-2));
    const __m256d cos_y =
        _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc, _mm256_fnmadd_pd(splat(0.5), z, splat(1.0)));

    // cos(y + q pi/2) for q mod 4 = 0, 1, 2, 3 is cos, -sin, -cos, sin.
    const __m256d qm = _mm256_sub_pd(q, _mm256_mul_pd(splat(4.0), _mm256_floor_pd(_mm256_mul_pd(q, splat(0.25)))));
    const __m256d is1 = _mm256_cmp_pd(qm, splat(1.0), _CMP_EQ_OQ);
    const __m256d is2 = _mm256_cmp_pd(qm, splat(2.0), _CMP_EQ_OQ);
    const __m256d is3 = _mm256_cmp_pd(qm, splat(3.0), _CMP_EQ_OQ);
    const __m256d odd = _mm256_or_pd(is1, is3);
    const __m256d neg = _mm256_or_pd(is1, is2);
    const __m256d v = _mm256_blendv_pd(cos_y, sin_y, odd);
    return _mm256_xor_pd(v, _mm256_and_pd(neg, splat(-0.0)));
}

// Natural log for positive normal inputs: exponent/mantissa split, mantissa
// folded into [sqrt(1/2), sqrt(2)], then 2 atanh(s) as an odd series in s.
inline __m256d log_pd(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256d two52 = splat(0x1p52);
    const __m256i biased = _mm256_srli_epi64(bits, 52);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))),
                              splat(0x1p52 + 1023.0));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                        _mm256_set1_epi64x(0x3ff0000000000000LL)));
    const __m256d big = _mm256_cmp_pd(m, splat(std::numbers::sqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, splat(1.0)));

    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, splat(1.0)), _mm256_add_pd(m, splat(1.0)));
    const __m256d s2 = _mm256_mul_pd(s, s);
    __m256d acc = splat(1.0 / 19.0);
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 17.0));
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 15.0));
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 13.0));
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 11.0));
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 9.0));
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 7.0));
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 5.0));
    acc = _mm256_fmadd_pd(acc, s2, splat(1.0 / 3.0));
    const __m256d two_s = _mm256_add_pd(s, s);
    const __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_s, s2), acc, two_s);

    constexpr double ln2_hi = 6.93147180369123816490e-01;  // low 21 bits zero
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    return _mm256_fmadd_pd(e, splat(ln2_hi), _mm256_fmadd_pd(e, splat(ln2_lo), log_m));
}

// exp for x <= 0; results below 2^-1022 flush to zero.
inline __m256d exp_pd(__m256d x) {
    x = _mm256_max_pd(x, splat(-745.0));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, splat(std::numbers::log2e)), kNearest);
    __m256d r = _mm256_fnmadd_pd(n, splat(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(n, splat(1.90821492927058770002e-10), r);

    // Taylor series to degree 13; |r| <= ln2/2 keeps the remainder below 1e-17.
    __m256d p = splat(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, splat(0.5));
    p = _mm256_fmadd_pd(p, r, splat(1.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0));

    // 2^n built directly in the exponent field; n + 1023 lands in the low mantissa bits.
    const __m256i biased = _mm256_castpd_si256(_mm256_add_pd(n, splat(0x1p52 + 1023.0)));
    const __m256d pow2 = _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));
    const __m256d normal = _mm256_cmp_pd(n, splat(-1022.0), _CMP_GE_OQ);
    return _mm256_and_pd(_mm256_mul_pd(p, pow2), normal);
}

inline __m256d loglik_block(__m256d f, const RamseyTerm &term) {
    const __m256d u = _mm256_fmadd_pd(f, splat(term.t), splat(term.theta / (2.0 * std::numbers::pi)));
    const __m256d c = cos_turns(u);
    const __m256d inner = _mm256_fmadd_pd(splat(term.beta_vis), c, splat(term.alpha));
    __m256d lik = _mm256_mul_pd(splat(0.5), _mm256_fmadd_pd(splat(term.outcome), inner, splat(1.0)));
    lik = _mm256_max_pd(lik, splat(kLikelihoodFloor));
    return log_pd(lik);
}

void accumulate_avx2(std::span<double> log_w, double f_first, double f_step, const RamseyTerm &term) {
    const size_t n = log_w.size();
    const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d first = splat(f_first);
    const __m256d step = splat(f_step);
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d idx = _mm256_add_pd(splat(static_cast<double>(j)), lane);
        const __m256d f = _mm256_add_pd(first, _mm256_mul_pd(idx, step));
        double *dst = log_w.data() + j;
        _mm256_storeu_pd(dst, _mm256_add_pd(_mm256_loadu_pd(dst), loglik_block(f, term)));
    }
    if (j < n) {
        alignas(32) double tail[4] = {0.0, 0.0, 0.0, 0.0};
        const __m256d idx = _mm256_add_pd(splat(static_cast<double>(j)), lane);
        const __m256d f = _mm256_add_pd(first, _mm256_mul_pd(idx, step));
        _mm256_store_pd(tail, loglik_block(f, term));
        for (size_t k = 0; j + k < n; ++k) log_w[j + k] += tail[k];
    }
}

double normalize_avx2(std::span<double> log_w) {
    const size_t n = log_w.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double ninf = -std::numeric_limits<double>::infinity();
    if (n == 0) return nan;

    __m256d vmax = splat(ninf);
    __m256d unordered = _mm256_setzero_pd();
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d v = _mm256_loadu_pd(log_w.data() + j);
        unordered = _mm256_or_pd(unordered, _mm256_cmp_pd(v, v, _CMP_UNORD_Q));
        vmax = _mm256_max_pd(vmax, v);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    double peak = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    if (_mm256_movemask_pd(unordered) != 0) return nan;
    for (size_t k = j; k < n; ++k) {
        if (std::isnan(log_w[k])) return nan;
        peak = std::max(peak, log_w[k]);
    }
    if (!std::isfinite(peak)) return nan;

    const __m256d vpeak = splat(peak);
    __m256d vsum = _mm256_setzero_pd();
    for (j = 0; j + 4 <= n; j += 4) {
        vsum = _mm256_add_pd(vsum, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(log_w.data() + j), vpeak)));
    }
    if (j < n) {
        alignas(32) double tail[4] = {ninf, ninf, ninf, ninf};
        for (size_t k = 0; j + k < n; ++k) tail[k] = log_w[j + k];
        vsum = _mm256_add_pd(vsum, exp_pd(_mm256_sub_pd(_mm256_load_pd(tail), vpeak)));
    }
    _mm256_store_pd(lanes, vsum);
    const double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    const double log_mass = peak + std::log(sum);

    const __m256d shift = splat(log_mass);
    for (j = 0; j + 4 <= n; j += 4) {
        double *p = log_w.data() + j;
        _mm256_storeu_pd(p, _mm256_sub_pd(_mm256_loadu_pd(p), shift));
    }
    for (; j < n; ++j) log_w[j] -= log_mass;
    return log_mass;
}

constexpr KernelTable kAvx2{"avx2", &accumulate_avx2, &normalize_avx2};

}  // namespace

const KernelTable &avx2_kernel_table() { return kAvx2; }

}  // namespace driftlock::simd
