// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <spaceform/errors.hpp>

#include <Eigen/Core>

#include <string>

namespace spaceform {

/// Real values on the oriented k-simplices of a surface mesh, k in {0, 1, 2}.
/// Each value is the integral of a k-form over its simplex.
struct Cochain {
    int degree = 0;
    Eigen::VectorXd values;

    Cochain() = default;
    Cochain(int k, Eigen::VectorXd v) : degree(k), values(std::move(v))
    {
        if (k < 0 || k > 2) throw DegreeError("cochain degree must be 0, 1 or 2");
    }

    static Cochain zeros(int k, Eigen::Index n) { return {k, Eigen::VectorXd::Zero(n)}; }

    Eigen::Index size() const { return values.size(); }
};

inline void require_same_degree(const Cochain& u, const Cochain& v)
{
    if (u.degree != v.degree || u.size() != v.size()) {
        throw DegreeError(
            "cochain mismatch: degree " + std::to_string(u.degree) + " vs " +
            std::to_string(v.degree));
    }
}

inline Cochain operator+(const Cochain& u, const Cochain& v)
{
    require_same_degree(u, v);
    return {u.degree, u.values + v.values};
}

inline Cochain operator-(const Cochain& u, const Cochain& v)
{
    require_same_degree(u, v);
    return {u.degree, u.values - v.values};
}

inline Cochain operator*(double s, const Cochain& u)
{
    return {u.degree, s * u.values};
}

} // namespace spaceform
