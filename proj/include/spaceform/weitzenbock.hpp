// SPDX-License-Identifier: Apache-2.0
//
// Exact-rational checks of the constant-curvature tensor identities behind
// the Bochner-Weitzenbock formula, in any dimension 2 <= N <= 6.
#pragma once

#include <spaceform/errors.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace spaceform {

using Rational = mpq_class;

/// Dense square matrix of rationals, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n * n), Rational(0)) {}

    static RationalMatrix identity(int n)
    {
        RationalMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int size() const { return n_; }
    Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }

    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

private:
    int n_ = 0;
    std::vector<Rational> a_;
};

inline RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y)
{
    const int n = x.size();
    RationalMatrix out(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Rational s = 0;
            for (int k = 0; k < n; ++k) s += x(i, k) * y(k, j);
            out(i, j) = s;
        }
    }
    return out;
}

inline RationalMatrix scaled(const RationalMatrix& x, const Rational& t)
{
    RationalMatrix out = x;
    for (int i = 0; i < x.size(); ++i) {
        for (int j = 0; j < x.size(); ++j) out(i, j) *= t;
    }
    return out;
}

/// Gauss-Jordan inverse; throws if the matrix is singular.
inline RationalMatrix inverse(const RationalMatrix& m)
{
    const int n = m.size();
    RationalMatrix a = m;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        while (pivot < n && a(pivot, col) == 0) ++pivot;
        if (pivot == n) throw PreconditionError("matrix is singular");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(col, j), a(pivot, j));
                std::swap(inv(col, j), inv(pivot, j));
            }
        }
        const Rational p = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a(r, col) == 0) continue;
            const Rational f = a(r, col);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Determinant of the leading i x i block, i = 1..n, by fraction-exact elimination.
inline std::vector<Rational> leading_minors(const RationalMatrix& m)
{
    const int n = m.size();
    std::vector<Rational> out;
    for (int size = 1; size <= n; ++size) {
        RationalMatrix a(size);
        for (int i = 0; i < size; ++i) {
            for (int j = 0; j < size; ++j) a(i, j) = m(i, j);
        }
        Rational det = 1;
        for (int col = 0; col < size; ++col) {
            int pivot = col;
            while (pivot < size && a(pivot, col) == 0) ++pivot;
            if (pivot == size) {
                det = 0;
                break;
            }
            if (pivot != col) {
                for (int j = 0; j < size; ++j) std::swap(a(col, j), a(pivot, j));
                det = -det;
            }
            det *= a(col, col);
            for (int r = col + 1; r < size; ++r) {
                if (a(r, col) == 0) continue;
                const Rational f = a(r, col) / a(col, col);
                for (int j = col; j < size; ++j) a(r, j) -= f * a(col, j);
            }
        }
        out.push_back(det);
    }
    return out;
}

/// Covariant tensor with `rank` indices in 0..n-1, stored with the first
/// index slowest.
class RationalTensor {
public:
    RationalTensor() = default;
    RationalTensor(int n, int rank)
        : n_(n), rank_(rank), a_(static_cast<std::size_t>(power(n, rank)), Rational(0))
    {
    }

    int dim() const { return n_; }
    int rank() const { return rank_; }
    std::size_t entries() const { return a_.size(); }

    std::size_t flat(const std::vector<int>& idx) const
    {
        std::size_t f = 0;
        for (int i : idx) f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        return f;
    }

    std::vector<int> unflat(std::size_t f) const
    {
        std::vector<int> idx(static_cast<std::size_t>(rank_));
        for (int p = rank_ - 1; p >= 0; --p) {
            idx[static_cast<std::size_t>(p)] = static_cast<int>(f % static_cast<std::size_t>(n_));
            f /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    Rational& operator[](std::size_t f) { return a_[f]; }
    const Rational& operator[](std::size_t f) const { return a_[f]; }
    Rational& at(const std::vector<int>& idx) { return a_[flat(idx)]; }
    const Rational& at(const std::vector<int>& idx) const { return a_[flat(idx)]; }

    friend bool operator==(const RationalTensor&, const RationalTensor&) = default;

private:
    static std::size_t power(int n, int k)
    {
        std::size_t p = 1;
        for (int i = 0; i < k; ++i) p *= static_cast<std::size_t>(n);
        return p;
    }

    int n_ = 0;
    int rank_ = 0;
    std::vector<Rational> a_;
};

inline RationalTensor scaled(const RationalTensor& t, const Rational& s)
{
    RationalTensor out = t;
    for (std::size_t f = 0; f < out.entries(); ++f) out[f] *= s;
    return out;
}

/// Sign of the permutation sorting idx, or 0 if an index repeats.
inline int permutation_sign(std::vector<int> idx)
{
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) sign = -sign;
        }
    }
    return sign;
}

/// True when every transposition of two slots flips the sign.
inline bool is_antisymmetric(const RationalTensor& t)
{
    const int k = t.rank();
    for (std::size_t f = 0; f < t.entries(); ++f) {
        auto idx = t.unflat(f);
        for (int p = 0; p < k; ++p) {
            for (int q = p + 1; q < k; ++q) {
                std::swap(idx[static_cast<std::size_t>(p)], idx[static_cast<std::size_t>(q)]);
                const bool ok = t.at(idx) == -t[f];
                std::swap(idx[static_cast<std::size_t>(p)], idx[static_cast<std::size_t>(q)]);
                if (!ok) return false;
            }
        }
    }
    return true;
}

/// Metric, its inverse, sectional curvature K = -a^2 and a k-form, all exact.
struct RationalTensorContext {
    int N = 2;
    RationalMatrix g;
    RationalMatrix g_inv;
    Rational K;
    RationalTensor alpha; ///< rank k, antisymmetric

    int degree() const { return alpha.rank(); }

    /// Throws PreconditionError on the first violated invariant.
    void validate() const
    {
        if (N < 2 || N > 6) throw PreconditionError("dimension must lie in 2..6");
        if (g.size() != N || g_inv.size() != N) throw PreconditionError("metric has the wrong size");
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                if (g(i, j) != g(j, i)) throw PreconditionError("metric is not symmetric");
            }
        }
        for (const auto& m : leading_minors(g)) {
            if (!(m > 0)) throw PreconditionError("metric is not positive definite");
        }
        if (!(g * g_inv == RationalMatrix::identity(N))) {
            throw PreconditionError("g_inv is not the inverse of g");
        }
        if (alpha.dim() != N || alpha.rank() < 0 || alpha.rank() > N) {
            throw PreconditionError("form has the wrong dimension or degree");
        }
        if (!is_antisymmetric(alpha)) throw PreconditionError("form is not antisymmetric");
    }
};

inline RationalTensorContext make_context(RationalMatrix g, Rational K, RationalTensor alpha)
{
    RationalTensorContext ctx;
    ctx.N = g.size();
    ctx.g_inv = inverse(g);
    ctx.g = std::move(g);
    ctx.K = std::move(K);
    ctx.alpha = std::move(alpha);
    ctx.validate();
    return ctx;
}

/// R_ijkl = K (g_il g_jk - g_ik g_jl).
inline RationalTensor riemann_constant_curvature(const RationalTensorContext& ctx)
{
    const int n = ctx.N;
    RationalTensor r(n, 4);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    r.at({i, j, k, l}) = ctx.K * (ctx.g(i, l) * ctx.g(j, k) - ctx.g(i, k) * ctx.g(j, l));
                }
            }
        }
    }
    return r;
}

/// R_ijkl = -R_jikl = -R_ijlk = R_klij for every index choice.
inline bool has_curvature_symmetries(const RationalTensor& r)
{
    const int n = r.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    const Rational& v = r.at({i, j, k, l});
                    if (r.at({j, i, k, l}) != -v || r.at({i, j, l, k}) != -v || r.at({k, l, i, j}) != v) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

struct Ricci {
    RationalMatrix lower; ///< R_ij = g^km R_kijm
    RationalMatrix mixed; ///< R^i_j = g^im R_mj
};

inline Ricci ricci_contract(const RationalTensor& r, const RationalTensorContext& ctx)
{
    const int n = ctx.N;
    Ricci out{RationalMatrix(n), RationalMatrix(n)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Rational s = 0;
            for (int k = 0; k < n; ++k) {
                for (int m = 0; m < n; ++m) s += ctx.g_inv(k, m) * r.at({k, i, j, m});
            }
            out.lower(i, j) = s;
        }
    }
    out.mixed = ctx.g_inv * out.lower;
    return out;
}

/// The Weitzenbock curvature term acting on alpha:
///
///     sum_nu (-1)^nu R^h_{i_nu} alpha_{h i_1 .. ^i_nu .. i_k}
///   - 2 sum_{mu < nu} (-1)^{mu+nu} R^{h i}_{i_nu i_mu} alpha_{i h i_1 .. ^i_mu .. ^i_nu .. i_k}
///
/// with positions counted from 1. On a space form it equals -K k (N - k) alpha.
inline RationalTensor weitzenbock_sums(const RationalTensorContext& ctx, const RationalTensor& r)
{
    const int n = ctx.N;
    const int k = ctx.degree();
    if (!is_antisymmetric(ctx.alpha)) throw PreconditionError("form is not antisymmetric");
    const RationalMatrix mixed = ricci_contract(r, ctx).mixed;

    // raised(h, i, a, b) = g^hp g^iq R_p a b q
    RationalTensor raised(n, 4);
    if (k >= 2) {
        RationalTensor half(n, 4); // g^hp R_p a b q, indices (h, a, b, q)
        for (int h = 0; h < n; ++h) {
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    for (int q = 0; q < n; ++q) {
                        Rational s = 0;
                        for (int p = 0; p < n; ++p) s += ctx.g_inv(h, p) * r.at({p, a, b, q});
                        half.at({h, a, b, q}) = s;
                    }
                }
            }
        }
        for (int h = 0; h < n; ++h) {
            for (int i = 0; i < n; ++i) {
                for (int a = 0; a < n; ++a) {
                    for (int b = 0; b < n; ++b) {
                        Rational s = 0;
                        for (int q = 0; q < n; ++q) s += ctx.g_inv(i, q) * half.at({h, a, b, q});
                        raised.at({h, i, a, b}) = s;
                    }
                }
            }
        }
    }

    const RationalTensor& alpha = ctx.alpha;
    RationalTensor out(n, k);
    std::vector<int> idx;
    std::vector<int> probe;
    for (std::size_t f = 0; f < out.entries(); ++f) {
        idx = out.unflat(f);
        Rational total = 0;
        for (int nu = 1; nu <= k; ++nu) {
            probe.assign(1, 0);
            for (int p = 1; p <= k; ++p) {
                if (p != nu) probe.push_back(idx[static_cast<std::size_t>(p - 1)]);
            }
            const Rational sign = (nu % 2 == 0) ? 1 : -1;
            for (int h = 0; h < n; ++h) {
                probe[0] = h;
                const Rational& a = alpha.at(probe);
                if (a == 0) continue;
                total += sign * mixed(h, idx[static_cast<std::size_t>(nu - 1)]) * a;
            }
        }
        for (int mu = 1; mu <= k; ++mu) {
            for (int nu = mu + 1; nu <= k; ++nu) {
                probe.assign(2, 0);
                for (int p = 1; p <= k; ++p) {
                    if (p != mu && p != nu) probe.push_back(idx[static_cast<std::size_t>(p - 1)]);
                }
                const Rational sign = ((mu + nu) % 2 == 0) ? -2 : 2;
                const int inu = idx[static_cast<std::size_t>(nu - 1)];
                const int imu = idx[static_cast<std::size_t>(mu - 1)];
                for (int i = 0; i < n; ++i) {
                    for (int h = 0; h < n; ++h) {
                        probe[0] = i;
                        probe[1] = h;
                        const Rational& a = alpha.at(probe);
                        if (a == 0) continue;
                        total += sign * raised.at({h, i, inu, imu}) * a;
                    }
                }
            }
        }
        out[f] = total;
    }
    return out;
}

/// Builds the Hodge star on the orthonormal basis of k-forms in dimension N,
/// applies it twice, and returns the common sign. Throws if star-star is not
/// a multiple of the identity.
inline int star_involution_sign(int N, int k)
{
    if (N < 1 || k < 0 || k > N) throw DegreeError("star involution needs 0 <= k <= N");
    // star e_I = sign(I, I^c) e_{I^c} on increasing index sets I.
    auto complement = [N](const std::vector<int>& set) {
        std::vector<int> rest;
        for (int i = 0; i < N; ++i) {
            if (!std::binary_search(set.begin(), set.end(), i)) rest.push_back(i);
        }
        return rest;
    };
    auto star = [&](const std::vector<int>& set) {
        std::vector<int> rest = complement(set);
        std::vector<int> joined = set;
        joined.insert(joined.end(), rest.begin(), rest.end());
        return std::pair{permutation_sign(joined), rest};
    };

    int result = 0;
    std::vector<bool> choose(static_cast<std::size_t>(N), false);
    std::fill(choose.begin(), choose.begin() + k, true);
    do {
        std::vector<int> set;
        for (int i = 0; i < N; ++i) {
            if (choose[static_cast<std::size_t>(i)]) set.push_back(i);
        }
        const auto [s1, once] = star(set);
        const auto [s2, twice] = star(once);
        if (twice != set) throw Error("star applied twice left the basis element");
        const int sign = s1 * s2;
        if (result == 0) result = sign;
        if (sign != result) throw Error("star-star is not a multiple of the identity");
    } while (std::prev_permutation(choose.begin(), choose.end()));
    return result;
}

/// Sign law (-1)^{Nk + k} for star star on k-forms in dimension N.
constexpr int expected_star_sign(int N, int k)
{
    return ((N * k + k) % 2 == 0) ? 1 : -1;
}

/// Seeded generator of random exact contexts: g = L^T L + I with small
/// integer L, K = -(p/q)^2, alpha with small rational components.
class ContextSampler {
public:
    explicit ContextSampler(std::uint64_t seed) : engine_(seed) {}

    ContextSampler(std::uint64_t seed, int N, int k, int trial)
    {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(trial)};
        engine_.seed(seq);
    }

    /// Uniform integer in [lo, hi]; modulo bias is irrelevant here and the
    /// mapping is the same on every platform.
    long draw(long lo, long hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(engine_() % span);
    }

    RationalMatrix metric(int N)
    {
        RationalMatrix l(N);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) l(i, j) = draw(-3, 3);
        }
        RationalMatrix lt(N);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) lt(i, j) = l(j, i);
        }
        RationalMatrix g = lt * l;
        for (int i = 0; i < N; ++i) g(i, i) += 1;
        return g;
    }

    Rational curvature()
    {
        Rational a(draw(1, 5), draw(1, 4));
        a.canonicalize();
        return -a * a;
    }

    RationalTensor form(int N, int k)
    {
        RationalTensor alpha(N, k);
        for (std::size_t f = 0; f < alpha.entries(); ++f) {
            const auto idx = alpha.unflat(f);
            if (!std::is_sorted(idx.begin(), idx.end()) || std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
                continue;
            }
            Rational v(draw(-9, 9), draw(1, 7));
            v.canonicalize();
            alpha[f] = v;
        }
        // Spread each increasing entry over its permutations.
        for (std::size_t f = 0; f < alpha.entries(); ++f) {
            const auto idx = alpha.unflat(f);
            const int sign = permutation_sign(idx);
            if (sign == 0 || std::is_sorted(idx.begin(), idx.end())) continue;
            auto sorted = idx;
            std::sort(sorted.begin(), sorted.end());
            alpha[f] = sign * alpha.at(sorted);
        }
        return alpha;
    }

    RationalTensorContext context(int N, int k) { return make_context(metric(N), curvature(), form(N, k)); }

private:
    std::mt19937_64 engine_;
};

/// Outcome of all identity checks on one context.
struct TensorCheck {
    bool context_valid = false;
    bool riemann_symmetries = false;
    bool ricci_lower = false;          ///< R_ij = K (N - 1) g_ij
    bool ricci_mixed = false;          ///< R^i_j = K (N - 1) delta^i_j
    bool weitzenbock = false;          ///< sums = -K k (N - k) alpha
    bool weitzenbock_antisymmetric = false;
    bool positive_factor_holds = false; ///< sums = K k (N - k) alpha
    bool star_sign = false;
    bool scale_covariance = false;    ///< under g -> t^2 g, K -> K / t^2

    bool passed() const
    {
        return context_valid && riemann_symmetries && ricci_lower && ricci_mixed && weitzenbock &&
               weitzenbock_antisymmetric && star_sign && scale_covariance;
    }
};

inline TensorCheck check_context(const RationalTensorContext& ctx, const Rational& t)
{
    TensorCheck c;
    try {
        ctx.validate();
        c.context_valid = true;
    } catch (const PreconditionError&) {
        return c;
    }
    const int n = ctx.N;
    const int k = ctx.degree();
    const RationalTensor r = riemann_constant_curvature(ctx);
    c.riemann_symmetries = has_curvature_symmetries(r);

    const Ricci ric = ricci_contract(r, ctx);
    const Rational ric_factor = ctx.K * (n - 1);
    c.ricci_lower = ric.lower == scaled(ctx.g, ric_factor);
    c.ricci_mixed = ric.mixed == scaled(RationalMatrix::identity(n), ric_factor);

    const RationalTensor sums = weitzenbock_sums(ctx, r);
    const Rational factor = ctx.K * (k * (n - k));
    c.weitzenbock = sums == scaled(ctx.alpha, -factor);
    c.weitzenbock_antisymmetric = is_antisymmetric(sums);
    c.positive_factor_holds = sums == scaled(ctx.alpha, factor);
    c.star_sign = star_involution_sign(n, k) == expected_star_sign(n, k);

    // g -> t^2 g, K -> K / t^2 keeps R_ij and divides R^i_j and the total by t^2.
    const Rational t2 = t * t;
    RationalTensorContext scaled_ctx = make_context(scaled(ctx.g, t2), ctx.K / t2, ctx.alpha);
    const RationalTensor r2 = riemann_constant_curvature(scaled_ctx);
    const Ricci ric2 = ricci_contract(r2, scaled_ctx);
    c.scale_covariance = ric2.lower == ric.lower && ric2.mixed == scaled(ric.mixed, 1 / t2) &&
                         weitzenbock_sums(scaled_ctx, r2) == scaled(sums, 1 / t2);
    return c;
}

struct TensorFailure {
    int N = 0;
    int k = 0;
    int trial = 0;
    TensorCheck check;
    RationalTensorContext context;
};

struct TensorPairReport {
    int N = 0;
    int k = 0;
    int trials = 0;
    int passed = 0;
    int positive_factor_holds = 0; ///< trials where sums = +K k (N - k) alpha also held
};

struct TensorSuiteReport {
    std::uint64_t seed = 0;
    std::vector<TensorPairReport> pairs;
    std::vector<TensorFailure> failures;

    bool passed() const { return failures.empty(); }
};

/// Runs `trials` seeded random contexts for every 2 <= N <= max_dim and
/// 0 <= k <= N.
inline TensorSuiteReport verify_tensor_identities(int max_dim, int trials, std::uint64_t seed)
{
    if (max_dim < 2 || max_dim > 6) throw PreconditionError("max dimension must lie in 2..6");
    if (trials < 1) throw PreconditionError("need at least one trial");
    TensorSuiteReport report;
    report.seed = seed;
    for (int n = 2; n <= max_dim; ++n) {
        for (int k = 0; k <= n; ++k) {
            TensorPairReport pair{n, k, trials, 0, 0};
            for (int trial = 0; trial < trials; ++trial) {
                ContextSampler sampler(seed, n, k, trial);
                RationalTensorContext ctx = sampler.context(n, k);
                Rational t(sampler.draw(1, 5), sampler.draw(1, 5));
                t.canonicalize();
                const TensorCheck c = check_context(ctx, t);
                if (c.passed()) {
                    ++pair.passed;
                } else {
                    report.failures.push_back({n, k, trial, c, std::move(ctx)});
                }
                if (c.positive_factor_holds) ++pair.positive_factor_holds;
            }
            report.pairs.push_back(pair);
        }
    }
    return report;
}

inline std::string to_string(const Rational& q)
{
    return q.get_str();
}

} // namespace spaceform
