#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "flowsep/refmodel.hpp"
#include "flowsep/state_space.hpp"

namespace flowsep {

// Interpolation points and values. Non-real points come in consecutive
// (p, conj(p)) pairs; real points stand alone.
struct InterpolationSet {
  std::vector<cdouble> points;
  std::vector<cdouble> values;

  std::size_t size() const { return points.size(); }
};

struct LoewnerPencil {
  InterpolationSet left;   // mu_i, v_i
  InterpolationSet right;  // lambda_j, w_j
  Eigen::MatrixXcd L;      // complex Loewner matrix
  Eigen::MatrixXcd Ls;     // complex shifted Loewner matrix
  // Real-coordinate counterparts after the conjugate-pair transform.
  Eigen::MatrixXd Lr;
  Eigen::MatrixXd Lsr;
  Eigen::VectorXd V;     // left values
  Eigen::RowVectorXd W;  // right values
};

// Alternating split: samples 0, 2, 4, ... go left, 1, 3, 5, ... go right,
// each closed under conjugation.
std::pair<InterpolationSet, InterpolationSet> partition(const ControllerSamples& samples);

LoewnerPencil build_pencil(const InterpolationSet& left, const InterpolationSet& right);

// Numerical rank of [L Ls] and [L; Ls] at tol * sigma_max; the smaller of the
// two. Returns 0 for an all-zero pencil.
int minimal_order(const LoewnerPencil& p, double tol = 1e-9);

// Order-r projected realization (E, A, B, C, D=0) from the dominant singular
// subspaces. r = minimal_order interpolates all data.
StateSpaceModel realize(const LoewnerPencil& p, int r, double tol = 1e-9);

}  // namespace flowsep
