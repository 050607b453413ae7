#include "flowsep/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "flowsep/errors.hpp"

namespace flowsep {
namespace {

// Conjugate-pair block sizes of a point set: 2 for (p, conj p), 1 for real p.
std::vector<int> pair_blocks(const InterpolationSet& s, const char* side) {
  std::vector<int> blocks;
  for (std::size_t i = 0; i < s.size();) {
    const cdouble p = s.points[i];
    if (p.imag() == 0.0) {
      if (s.values[i].imag() != 0.0) {
        throw ConfigError(std::string(side) + " set: real point with non-real value");
      }
      blocks.push_back(1);
      i += 1;
      continue;
    }
    if (i + 1 >= s.size() || s.points[i + 1] != std::conj(p) ||
        s.values[i + 1] != std::conj(s.values[i])) {
      throw ConfigError(std::string(side) + " set is not closed under conjugation at index " +
                        std::to_string(i));
    }
    blocks.push_back(2);
    i += 2;
  }
  return blocks;
}

// Block-diagonal unitary mapping conjugate-pair coordinates to real ones.
Eigen::MatrixXcd realifier(const std::vector<int>& blocks, Eigen::Index n) {
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
  const double s = 1.0 / std::numbers::sqrt2;
  const cdouble I(0.0, 1.0);
  Eigen::Index k = 0;
  for (const int b : blocks) {
    if (b == 1) {
      J(k, k) = 1.0;
    } else {
      J(k, k) = s;
      J(k, k + 1) = -I * s;
      J(k + 1, k) = s;
      J(k + 1, k + 1) = I * s;
    }
    k += b;
  }
  return J;
}

template <typename M>
double max_abs(const M& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Imaginary parts must vanish relative to the entry scale.
Eigen::MatrixXd take_real(const Eigen::MatrixXcd& m, const char* what) {
  const double scale = std::max(max_abs(m), 1.0);
  const double im = max_abs(m.imag());
  if (im > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "realification of " << what << " left imaginary residue " << im;
    throw NumericalError(msg.str());
  }
  return m.real();
}

int numerical_rank(const Eigen::VectorXd& sv, double tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * sv(0)) ++r;
  }
  return r;
}

void append_conjugate_pair(InterpolationSet& s, double omega, cdouble value) {
  s.points.emplace_back(0.0, omega);
  s.values.push_back(value);
  s.points.emplace_back(0.0, -omega);
  s.values.push_back(std::conj(value));
}

}  // namespace

std::pair<InterpolationSet, InterpolationSet> partition(const ControllerSamples& samples) {
  if (samples.size() < 2) throw ConfigError("partition: at least 2 samples required");
  InterpolationSet left, right;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k > 0 && samples[k].omega == samples[k - 1].omega) {
      throw ConfigError("partition: duplicate omega in samples");
    }
    append_conjugate_pair(k % 2 == 0 ? left : right, samples[k].omega, samples[k].value);
  }
  return {std::move(left), std::move(right)};
}

LoewnerPencil build_pencil(const InterpolationSet& left, const InterpolationSet& right) {
  if (left.points.size() != left.values.size() || right.points.size() != right.values.size()) {
    throw DimensionError("build_pencil: points and values differ in length");
  }
  if (left.size() == 0 || right.size() == 0) throw ConfigError("build_pencil: empty point set");
  const auto lb = pair_blocks(left, "left");
  const auto rb = pair_blocks(right, "right");

  const auto nl = static_cast<Eigen::Index>(left.size());
  const auto nr = static_cast<Eigen::Index>(right.size());
  LoewnerPencil p;
  p.left = left;
  p.right = right;
  p.L.resize(nl, nr);
  p.Ls.resize(nl, nr);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const cdouble mu = left.points[i];
    const cdouble v = left.values[i];
    for (Eigen::Index j = 0; j < nr; ++j) {
      const cdouble la = right.points[j];
      const cdouble w = right.values[j];
      const cdouble d = mu - la;
      if (d == 0.0) {
        std::ostringstream msg;
        msg << "build_pencil: left point " << mu << " coincides with a right point";
        throw NumericalError(msg.str());
      }
      p.L(i, j) = (v - w) / d;
      p.Ls(i, j) = (mu * v - la * w) / d;
    }
  }

  Eigen::VectorXcd v(nl);
  Eigen::RowVectorXcd w(nr);
  for (Eigen::Index i = 0; i < nl; ++i) v(i) = left.values[i];
  for (Eigen::Index j = 0; j < nr; ++j) w(j) = right.values[j];

  const Eigen::MatrixXcd Jl = realifier(lb, nl);
  const Eigen::MatrixXcd Jr = realifier(rb, nr);
  p.Lr = take_real(Jl.adjoint() * p.L * Jr, "L");
  p.Lsr = take_real(Jl.adjoint() * p.Ls * Jr, "Ls");
  p.V = take_real(Jl.adjoint() * v, "V");
  p.W = take_real(w * Jr, "W");
  return p;
}

int minimal_order(const LoewnerPencil& p, double tol) {
  if (!(tol > 0.0)) throw ConfigError("minimal_order: tol must be > 0");
  Eigen::MatrixXd row(p.Lr.rows(), 2 * p.Lr.cols());
  row << p.Lr, p.Lsr;
  Eigen::MatrixXd col(2 * p.Lr.rows(), p.Lr.cols());
  col << p.Lr, p.Lsr;
  const Eigen::BDCSVD<Eigen::MatrixXd> s1(row);
  const Eigen::BDCSVD<Eigen::MatrixXd> s2(col);
  return std::min(numerical_rank(s1.singularValues(), tol),
                  numerical_rank(s2.singularValues(), tol));
}

StateSpaceModel realize(const LoewnerPencil& p, int r, double tol) {
  const int n = minimal_order(p, tol);
  if (r < 1 || r > n) {
    throw OrderError("realize: requested order " + std::to_string(r) +
                     " outside [1, " + std::to_string(n) + "]");
  }
  Eigen::MatrixXd row(p.Lr.rows(), 2 * p.Lr.cols());
  row << p.Lr, p.Lsr;
  Eigen::MatrixXd col(2 * p.Lr.rows(), p.Lr.cols());
  col << p.Lr, p.Lsr;
  const Eigen::BDCSVD<Eigen::MatrixXd> s1(row, Eigen::ComputeThinU);
  const Eigen::BDCSVD<Eigen::MatrixXd> s2(col, Eigen::ComputeThinV);
  const Eigen::MatrixXd Y = s1.matrixU().leftCols(r);
  const Eigen::MatrixXd X = s2.matrixV().leftCols(r);

  StateSpaceModel m;
  m.E = -Y.transpose() * p.Lr * X;
  m.A = -Y.transpose() * p.Lsr * X;
  m.B = Y.transpose() * p.V;
  m.C = p.W * X;
  m.D = 0.0;
  m.domain = TimeDomain::Continuous;
  m.validate();

  // Regularity: the pencil must be invertible at a generic shift.
  const double ea = max_abs(m.E) > 0.0 ? max_abs(m.A) / max_abs(m.E) : 1.0;
  const cdouble shift = cdouble(0.37, 0.81) * std::max(ea, 1e-12);
  const Eigen::MatrixXcd P = shift * m.E.cast<cdouble>() - m.A.cast<cdouble>();
  if (!(Eigen::PartialPivLU<Eigen::MatrixXcd>(P).rcond() > 1e-14)) {
    throw NumericalError("realize: projected pencil (A, E) is not regular");
  }
  return m;
}

}  // namespace flowsep
