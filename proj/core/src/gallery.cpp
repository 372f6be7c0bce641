#include "dsm/gallery.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <memory>

#include "dsm/errors.hpp"
#include "dsm/rng.hpp"

#include <nlohmann/json.hpp>

namespace dsm {

namespace {

Vector ones(int n) { return Vector::Constant(n, Complex(1.0, 0.0)); }

OperatorProblem identity_problem(int n) {
  OperatorProblem p;
  p.name = "identity";
  p.dimension = n;
  p.op = [](const Vector& u) { return u; };
  p.derivative = [n](const Vector&) { return Matrix::Identity(n, n); };
  p.data = ones(n);
  p.known_solution = ones(n);
  p.holder = {0.0, 1.0};
  p.resolvent = {1.0, 1.0, 100.0, 0.0};
  return p;
}

OperatorProblem cubic_monotone_problem(int n) {
  OperatorProblem p;
  p.name = "cubic-monotone";
  p.dimension = n;
  p.op = [](const Vector& u) { return (u.array() + u.array().cube()).matrix().eval(); };
  p.derivative = [n](const Vector& u) {
    Matrix A = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) A(i, i) = 1.0 + 3.0 * u[i] * u[i];
    return A;
  };
  p.known_solution = ones(n);
  p.data = 2.0 * ones(n);
  // Lipschitz constant of the derivative on the unit ball.
  p.holder = {6.0, 1.0};
  p.resolvent = {1.0, 1.0, 100.0, 0.0};
  return p;
}

// F_i(u) = u_i + |u_i|^{1+kappa} sign(u_i) / (1+kappa): the derivative
// 1 + |u_i|^kappa exists everywhere and is exactly kappa-Hoelder.
OperatorProblem hoelder_problem(int n) {
  const double kappa = 0.5;
  OperatorProblem p;
  p.name = "hoelder";
  p.dimension = n;
  p.op = [n, kappa](const Vector& u) {
    Vector out(n);
    for (int i = 0; i < n; ++i) {
      const double m = std::abs(u[i]);
      out[i] = u[i] + (m > 0.0 ? std::pow(m, kappa) * u[i] / (1.0 + kappa) : Complex(0.0));
    }
    return out;
  };
  p.derivative = [n, kappa](const Vector& u) {
    Matrix A = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) A(i, i) = 1.0 + std::pow(std::abs(u[i]), kappa);
    return A;
  };
  p.known_solution = ones(n);
  p.data = (1.0 + 1.0 / (1.0 + kappa)) * ones(n);
  p.holder = {1.0, kappa};
  p.resolvent = {1.0, 1.0, 100.0, 0.0};
  return p;
}

Matrix hilbert_matrix(int n) {
  Matrix H(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) H(i, j) = 1.0 / static_cast<double>(i + j + 1);
  }
  return H;
}

OperatorProblem linear_problem(std::string name, Matrix A, Vector f,
                               std::optional<Vector> y) {
  const int n = static_cast<int>(A.rows());
  auto Ap = std::make_shared<Matrix>(std::move(A));
  OperatorProblem p;
  p.name = std::move(name);
  p.dimension = n;
  p.op = [Ap](const Vector& u) { return (*Ap) * u; };
  p.derivative = [Ap](const Vector&) { return *Ap; };
  p.data = std::move(f);
  p.known_solution = std::move(y);
  p.holder = {0.0, 1.0};
  p.resolvent = {1.0, 1.0, 100.0, 0.0};
  return p;
}

// Random rank-deficient real matrix with two zero singular values (one for n = 2),
// the rest log-spaced in [0.5, 1].
Matrix rank_deficient_matrix(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd G1(n, n), G2(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      G1(i, j) = gauss(rng);
      G2(i, j) = gauss(rng);
    }
  }
  Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(G1).householderQ();
  Eigen::MatrixXd V = Eigen::HouseholderQR<Eigen::MatrixXd>(G2).householderQ();
  const int zeros = (n >= 3) ? 2 : 1;
  const int rank = n - zeros;
  Eigen::VectorXd sv = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < rank; ++i) {
    sv[i] = (rank == 1) ? 1.0 : std::pow(2.0, -static_cast<double>(i) / (rank - 1));
  }
  Eigen::MatrixXd B = U * sv.asDiagonal() * V.transpose();
  return B.cast<Complex>();
}

// Minimal-norm solution via SVD, used only to populate known_solution.
Vector pinv_solve(const Matrix& A, const Vector& f) {
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? sv[0] * 1e-12 : 0.0;
  Vector coeff = svd.matrixU().adjoint() * f;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    coeff[i] = (sv[i] > cutoff) ? coeff[i] / sv[i] : Complex(0.0);
  }
  return svd.matrixV() * coeff;
}

}  // namespace

OperatorProblem make_gallery(const std::string& name, int n, std::uint64_t seed) {
  if (n < 1) throw GalleryError("make_gallery: dimension must be >= 1");
  if (name == "identity") return identity_problem(n);
  if (name == "cubic-monotone") return cubic_monotone_problem(n);
  if (name == "hoelder") return hoelder_problem(n);
  if (name == "hilbert-linear") {
    Matrix H = hilbert_matrix(n);
    Vector f = H * ones(n);
    return linear_problem("hilbert-linear", std::move(H), std::move(f), ones(n));
  }
  if (name == "rank-deficient" || name == "normal-equations") {
    if (n < 2) throw GalleryError("make_gallery: " + name + " needs n >= 2");
    Matrix B = rank_deficient_matrix(n, seed);
    Rng rng(seed + 0x9e3779b97f4a7c15ull);
    Vector x0 = random_real_ball(n, 1.0, rng);
    Vector f = B * x0;
    Vector y = pinv_solve(B, f);
    if (name == "rank-deficient") {
      return linear_problem("rank-deficient", std::move(B), std::move(f), std::move(y));
    }
    Matrix T = B.adjoint() * B;
    Vector tdata = B.adjoint() * f;
    return linear_problem("normal-equations", std::move(T), std::move(tdata), std::move(y));
  }
  std::string ids;
  for (const auto& id : gallery_ids()) ids += (ids.empty() ? "" : ", ") + id;
  throw GalleryError("make_gallery: unknown gallery '" + name + "' (valid: " + ids + ")");
}

const std::vector<std::string>& gallery_ids() {
  static const std::vector<std::string> ids = {
      "identity",       "cubic-monotone", "hoelder",
      "hilbert-linear", "rank-deficient", "normal-equations"};
  return ids;
}

std::string gallery_manifest_json() {
  using nlohmann::json;
  json manifest = json::array();
  auto entry = [](const std::string& name, int n, const OperatorProblem& p,
                  const std::string& note) {
    json e;
    e["name"] = name;
    e["n"] = n;
    e["seed"] = 0;
    e["constants"] = {{"c0", p.holder.c0},
                      {"kappa", p.holder.kappa},
                      {"c1", p.resolvent.c1},
                      {"b", p.resolvent.b},
                      {"epsilon0", p.resolvent.epsilon0}};
    e["has_known_solution"] = p.known_solution.has_value();
    if (!note.empty()) e["note"] = note;
    return e;
  };
  manifest.push_back(entry("identity", 2, make_gallery("identity", 2), ""));
  manifest.push_back(entry("cubic-monotone", 1, make_gallery("cubic-monotone", 1), ""));
  manifest.push_back(entry("hoelder", 1, make_gallery("hoelder", 1), ""));
  manifest.push_back(entry("hilbert-linear", 5, make_gallery("hilbert-linear", 5), ""));
  manifest.push_back(entry(
      "rank-deficient", 5, make_gallery("rank-deficient", 5),
      "resolvent constants describe the normal-equations wrap T = A^H A; "
      "intended for the normal-solution path"));
  manifest.push_back(entry("normal-equations", 5, make_gallery("normal-equations", 5), ""));
  return manifest.dump(2) + "\n";
}

}  // namespace dsm
