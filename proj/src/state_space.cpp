#include "flowsep/state_space.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "flowsep/errors.hpp"

namespace flowsep {

void StateSpaceModel::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || E.rows() != n || E.cols() != n || B.size() != n || C.size() != n) {
    throw DimensionError("state-space model: inconsistent matrix shapes");
  }
  if (!A.allFinite() || !E.allFinite() || !B.allFinite() || !C.allFinite() || !std::isfinite(D)) {
    throw NumericalError("state-space model: non-finite entries");
  }
  if (domain == TimeDomain::Sampled && !(h > 0.0)) {
    throw ConfigError("state-space model: sampled model needs h > 0");
  }
}

std::complex<double> eval_tf(const StateSpaceModel& m, std::complex<double> x) {
  m.validate();
  if (m.order() == 0) return m.D;
  const Eigen::MatrixXcd pencil = x * m.E.cast<std::complex<double>>() - m.A.cast<std::complex<double>>();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(pencil);
  // Reciprocal condition estimate guards against evaluating on a pole.
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream msg;
    msg << "pole evaluation: shift " << x << " is (numerically) a generalized eigenvalue";
    throw PoleEvaluationError(msg.str());
  }
  const Eigen::VectorXcd v = lu.solve(m.B.cast<std::complex<double>>());
  return m.D + (m.C.cast<std::complex<double>>() * v)(0);
}

Eigen::VectorXcd poles(const StateSpaceModel& m) {
  m.validate();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(m.E);
  if (!lu.isInvertible()) throw NumericalError("poles: E is singular");
  const Eigen::EigenSolver<Eigen::MatrixXd> es(lu.solve(m.A), false);
  return es.eigenvalues();
}

namespace {

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& M) {
  out << name << " " << M.rows() << " " << M.cols() << "\n";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << M(i, j);
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const char* name) {
  std::string tag;
  Eigen::Index r = 0, c = 0;
  if (!(in >> tag >> r >> c) || tag != name || r < 0 || c < 0) {
    throw ConfigError(std::string("model file: expected matrix header '") + name + "'");
  }
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      if (!(in >> M(i, j))) throw ConfigError(std::string("model file: truncated matrix ") + name);
    }
  }
  return M;
}

}  // namespace

std::string serialize_model(const StateSpaceModel& m) {
  m.validate();
  std::ostringstream out;
  out << std::setprecision(17);
  out << "flowsep-ss 1\n";
  out << "domain " << (m.domain == TimeDomain::Continuous ? "continuous" : "sampled") << "\n";
  out << "h " << m.h << "\n";
  out << "order " << m.order() << "\n";
  write_matrix(out, "E", m.E);
  write_matrix(out, "A", m.A);
  write_matrix(out, "B", m.B);
  write_matrix(out, "C", m.C);
  out << "D " << m.D << "\n";
  return out.str();
}

StateSpaceModel deserialize_model(const std::string& text) {
  std::istringstream in(text);
  std::string tag, domain;
  int version = 0;
  if (!(in >> tag >> version) || tag != "flowsep-ss" || version != 1) {
    throw ConfigError("model file: missing 'flowsep-ss 1' header");
  }
  StateSpaceModel m;
  if (!(in >> tag >> domain) || tag != "domain") throw ConfigError("model file: missing domain");
  if (domain == "continuous") {
    m.domain = TimeDomain::Continuous;
  } else if (domain == "sampled") {
    m.domain = TimeDomain::Sampled;
  } else {
    throw ConfigError("model file: unknown domain '" + domain + "'");
  }
  Eigen::Index n = 0;
  if (!(in >> tag >> m.h) || tag != "h") throw ConfigError("model file: missing h");
  if (!(in >> tag >> n) || tag != "order") throw ConfigError("model file: missing order");
  m.E = read_matrix(in, "E");
  m.A = read_matrix(in, "A");
  m.B = read_matrix(in, "B");
  m.C = read_matrix(in, "C");
  if (!(in >> tag >> m.D) || tag != "D") throw ConfigError("model file: missing D");
  if (m.A.rows() != n) throw DimensionError("model file: order does not match matrix sizes");
  m.validate();
  return m;
}

void save_model(const std::string& path, const StateSpaceModel& m) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write model file '" + path + "'");
  f << serialize_model(m);
}

StateSpaceModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace flowsep
