#pragma once

#include "cmg/operator.hpp"
#include "cmg/problem.hpp"

namespace cmg::fem {

// Gram matrix of the deriv-th derivatives of the interior B-splines of degree
// p on 2^level unit elements (integer knot coordinates, no h scaling). The
// first and last bc_order basis functions are removed.
ExactOperator gram_1d(int degree, int deriv, int bc_order, int level);
// Coefficients of the level-1 interior B-splines in the level basis.
ExactOperator prolongation_1d(int degree, int bc_order, int fine_level);

// Physically scaled operators for h = 2^-level.
ExactOperator stiffness(const ProblemSpec& problem, int level);
ExactOperator mass(const ProblemSpec& problem, int level);
ExactOperator prolongation(const ProblemSpec& problem, int fine_level);

// P^T A P in exact arithmetic.
ExactOperator galerkin_coarsen(const ExactOperator& a, const ExactOperator& p);

// Stiffness rounded to assembly_width (at least 256 bits).
StencilOperator assemble_fine_operator(const ProblemSpec& problem, int level, int assembly_width);

}  // namespace cmg::fem
