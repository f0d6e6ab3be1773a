#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wvsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kProjectorTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kOrthoEps = 1e-10;
inline constexpr Index kMaxDimension = Index(1) << 20;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BasisMismatchError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NonHermitianError : public Error {
 public:
  using Error::Error;
};

class NonUnitaryError : public Error {
 public:
  using Error::Error;
};

class OrthogonalPostselectionError : public Error {
 public:
  using Error::Error;
};

class NoClickError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

enum class Pol { H, V };

std::string to_string(Pol p);

/// A single basis mode: spatial path plus optional polarization and tag-qubit level.
struct ModeLabel {
  std::string path;
  std::optional<Pol> pol;
  std::optional<std::string> tag;

  bool operator==(const ModeLabel&) const = default;
  bool operator<(const ModeLabel& other) const;
  std::string str() const;
};

ModeLabel merge_labels(const ModeLabel& a, const ModeLabel& b);

/// Immutable ordered mode basis. Labels are unique; ordering is total and stable.
class Basis {
 public:
  Basis();
  explicit Basis(std::vector<ModeLabel> labels);
  static Basis lexicographic(std::vector<ModeLabel> labels);

  Index dim() const { return static_cast<Index>(labels_->size()); }
  const std::vector<ModeLabel>& labels() const { return *labels_; }
  const ModeLabel& label(Index i) const { return (*labels_)[static_cast<std::size_t>(i)]; }
  Index index_of(const ModeLabel& m) const;
  std::optional<Index> find(const ModeLabel& m) const;
  std::vector<Index> indices_on_path(const std::string& path) const;
  bool has_path(const std::string& path) const;

  bool operator==(const Basis& other) const;
  bool operator!=(const Basis& other) const { return !(*this == other); }

 private:
  std::shared_ptr<const std::vector<ModeLabel>> labels_;
};

struct StateVector {
  Basis basis;
  Vector amps;

  StateVector() = default;
  StateVector(Basis b, Vector a);
  static StateVector ket(const Basis& b, const ModeLabel& m);
  static StateVector zero(const Basis& b);

  double norm() const { return amps.norm(); }
  StateVector normalized() const;
};

struct Operator {
  Basis basis;
  Matrix mat;
  bool projector_flag = false;

  Operator() = default;
  Operator(Basis b, Matrix m, bool projector = false);
  static Operator identity(const Basis& b);
  static Operator zero(const Basis& b);
};

/// Spectral decomposition of a Hermitian operator. Eigenvalues ascending,
/// eigenvectors orthonormal columns.
struct EigenDecomposition {
  Basis basis;
  RealVector eigenvalues;
  Matrix eigenvectors;
};

StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(const Operator& a, const Operator& b);

Operator projector(const std::vector<ModeLabel>& modes, const Basis& basis);
Operator projector_on_paths(const std::set<std::string>& paths, const Basis& basis);

/// ⟨bra|ket⟩, conjugate-linear in the bra.
Complex inner(const StateVector& bra, const StateVector& ket);

EigenDecomposition eigh(const Operator& op);

}  // namespace wvsim
