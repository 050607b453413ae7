#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace flowsep {

enum class TimeDomain { Continuous, Sampled };

// Descriptor SISO model H = D + C (x E - A)^-1 B, x = s or z.
struct StateSpaceModel {
  Eigen::MatrixXd E;
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
  TimeDomain domain = TimeDomain::Continuous;
  double h = 0.0;  // sample period, sampled models only

  Eigen::Index order() const { return A.rows(); }
  // Shapes consistent, entries finite, h > 0 when sampled.
  void validate() const;
};

std::complex<double> eval_tf(const StateSpaceModel& m, std::complex<double> x);

// Generalized eigenvalues of (A, E); throws if E is singular.
Eigen::VectorXcd poles(const StateSpaceModel& m);

// Plain text: header lines, then each matrix row-major, 17 significant digits.
std::string serialize_model(const StateSpaceModel& m);
StateSpaceModel deserialize_model(const std::string& text);
void save_model(const std::string& path, const StateSpaceModel& m);
StateSpaceModel load_model(const std::string& path);

}  // namespace flowsep
