#include "wvsim/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace wvsim {

std::string to_string(Pol p) { return p == Pol::H ? "H" : "V"; }

namespace {

int pol_rank(const std::optional<Pol>& p) {
  if (!p) return 0;
  return *p == Pol::H ? 1 : 2;
}

}  // namespace

bool ModeLabel::operator<(const ModeLabel& other) const {
  if (path != other.path) return path < other.path;
  if (pol != other.pol) return pol_rank(pol) < pol_rank(other.pol);
  if (tag.has_value() != other.tag.has_value()) return !tag.has_value();
  if (tag && other.tag) return *tag < *other.tag;
  return false;
}

std::string ModeLabel::str() const {
  std::string s = path;
  if (pol) {
    s += "." + to_string(*pol);
  } else if (tag) {
    s += "._";
  }
  if (tag) s += "." + *tag;
  return s;
}

ModeLabel merge_labels(const ModeLabel& a, const ModeLabel& b) {
  ModeLabel out;
  if (!a.path.empty() && !b.path.empty()) {
    out.path = a.path + "/" + b.path;
  } else {
    out.path = a.path.empty() ? b.path : a.path;
  }
  if (a.pol && b.pol) {
    throw BasisMismatchError("cannot tensor two labels that both carry polarization: " +
                             a.str() + " and " + b.str());
  }
  out.pol = a.pol ? a.pol : b.pol;
  if (a.tag && b.tag) {
    out.tag = *a.tag + *b.tag;
  } else if (a.tag || b.tag) {
    out.tag = a.tag ? a.tag : b.tag;
  }
  return out;
}

Basis::Basis() : labels_(std::make_shared<const std::vector<ModeLabel>>()) {}

Basis::Basis(std::vector<ModeLabel> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) {
        throw BasisMismatchError("duplicate mode label in basis: " + labels[i].str());
      }
    }
  }
  labels_ = std::make_shared<const std::vector<ModeLabel>>(std::move(labels));
}

Basis Basis::lexicographic(std::vector<ModeLabel> labels) {
  std::sort(labels.begin(), labels.end());
  return Basis(std::move(labels));
}

Index Basis::index_of(const ModeLabel& m) const {
  auto idx = find(m);
  if (!idx) throw BasisMismatchError("mode label not in basis: " + m.str());
  return *idx;
}

std::optional<Index> Basis::find(const ModeLabel& m) const {
  for (Index i = 0; i < dim(); ++i) {
    if (label(i) == m) return i;
  }
  return std::nullopt;
}

std::vector<Index> Basis::indices_on_path(const std::string& path) const {
  std::vector<Index> out;
  for (Index i = 0; i < dim(); ++i) {
    if (label(i).path == path) out.push_back(i);
  }
  return out;
}

bool Basis::has_path(const std::string& path) const {
  return !indices_on_path(path).empty();
}

bool Basis::operator==(const Basis& other) const {
  if (labels_ == other.labels_) return true;
  return *labels_ == *other.labels_;
}

StateVector::StateVector(Basis b, Vector a) : basis(std::move(b)), amps(std::move(a)) {
  if (amps.size() != basis.dim()) {
    throw DimensionError("amplitude count does not match basis size");
  }
  if (!amps.allFinite()) {
    throw InvalidArgumentError("state amplitudes must be finite");
  }
}

StateVector StateVector::ket(const Basis& b, const ModeLabel& m) {
  Vector v = Vector::Zero(b.dim());
  v(b.index_of(m)) = Complex(1.0, 0.0);
  return StateVector(b, std::move(v));
}

StateVector StateVector::zero(const Basis& b) {
  return StateVector(b, Vector::Zero(b.dim()));
}

StateVector StateVector::normalized() const {
  double n = norm();
  if (n <= 0.0) throw InvalidArgumentError("cannot normalize zero state");
  return StateVector(basis, amps / n);
}

Operator::Operator(Basis b, Matrix m, bool projector)
    : basis(std::move(b)), mat(std::move(m)), projector_flag(projector) {
  if (mat.rows() != mat.cols()) throw DimensionError("operator matrix must be square");
  if (mat.rows() != basis.dim()) {
    throw DimensionError("operator dimension does not match basis size");
  }
  if (projector_flag) {
    double idem = (mat * mat - mat).norm();
    double herm = (mat.adjoint() - mat).norm();
    if (idem > kProjectorTol || herm > kProjectorTol) {
      throw InvalidArgumentError("operator flagged projector is not a projector");
    }
  }
}

Operator Operator::identity(const Basis& b) {
  return Operator(b, Matrix::Identity(b.dim(), b.dim()), true);
}

Operator Operator::zero(const Basis& b) {
  return Operator(b, Matrix::Zero(b.dim(), b.dim()), true);
}

namespace {

struct ProductBasis {
  Basis basis;
  // perm[k] = canonical position of a-major product index k
  std::vector<Index> perm;
};

ProductBasis product_basis(const Basis& a, const Basis& b) {
  if (a.dim() > 0 && b.dim() > kMaxDimension / a.dim()) {
    throw DimensionError("tensor product dimension exceeds 2^20");
  }
  const Index n = a.dim() * b.dim();
  std::vector<ModeLabel> merged;
  merged.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < a.dim(); ++i) {
    for (Index j = 0; j < b.dim(); ++j) {
      merged.push_back(merge_labels(a.label(i), b.label(j)));
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    return merged[static_cast<std::size_t>(x)] < merged[static_cast<std::size_t>(y)];
  });
  std::vector<ModeLabel> sorted;
  sorted.reserve(static_cast<std::size_t>(n));
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index pos = 0; pos < n; ++pos) {
    Index src = order[static_cast<std::size_t>(pos)];
    sorted.push_back(merged[static_cast<std::size_t>(src)]);
    perm[static_cast<std::size_t>(src)] = pos;
  }
  return ProductBasis{Basis(std::move(sorted)), std::move(perm)};
}

}  // namespace

StateVector tensor(const StateVector& a, const StateVector& b) {
  ProductBasis pb = product_basis(a.basis, b.basis);
  Vector v = Vector::Zero(pb.basis.dim());
  for (Index i = 0; i < a.basis.dim(); ++i) {
    for (Index j = 0; j < b.basis.dim(); ++j) {
      Index k = i * b.basis.dim() + j;
      v(pb.perm[static_cast<std::size_t>(k)]) = a.amps(i) * b.amps(j);
    }
  }
  return StateVector(pb.basis, std::move(v));
}

Operator tensor(const Operator& a, const Operator& b) {
  ProductBasis pb = product_basis(a.basis, b.basis);
  const Index db = b.basis.dim();
  Matrix m = Matrix::Zero(pb.basis.dim(), pb.basis.dim());
  for (Index i = 0; i < a.basis.dim(); ++i) {
    for (Index j = 0; j < b.basis.dim(); ++j) {
      Index row = pb.perm[static_cast<std::size_t>(i * db + j)];
      for (Index k = 0; k < a.basis.dim(); ++k) {
        for (Index l = 0; l < db; ++l) {
          Index col = pb.perm[static_cast<std::size_t>(k * db + l)];
          m(row, col) = a.mat(i, k) * b.mat(j, l);
        }
      }
    }
  }
  return Operator(pb.basis, std::move(m));
}

Operator projector(const std::vector<ModeLabel>& modes, const Basis& basis) {
  Matrix m = Matrix::Zero(basis.dim(), basis.dim());
  for (const auto& mode : modes) {
    Index i = basis.index_of(mode);
    m(i, i) = Complex(1.0, 0.0);
  }
  return Operator(basis, std::move(m), true);
}

Operator projector_on_paths(const std::set<std::string>& paths, const Basis& basis) {
  Matrix m = Matrix::Zero(basis.dim(), basis.dim());
  for (const auto& path : paths) {
    auto idx = basis.indices_on_path(path);
    if (idx.empty()) throw BasisMismatchError("no basis mode on path: " + path);
    for (Index i : idx) m(i, i) = Complex(1.0, 0.0);
  }
  return Operator(basis, std::move(m), true);
}

Complex inner(const StateVector& bra, const StateVector& ket) {
  if (bra.basis != ket.basis) throw BasisMismatchError("inner product requires a shared basis");
  return bra.amps.dot(ket.amps);
}

EigenDecomposition eigh(const Operator& op) {
  double herm = (op.mat - op.mat.adjoint()).norm();
  if (herm > kHermitianTol) {
    throw NonHermitianError("operator is not Hermitian within 1e-10");
  }
  Matrix sym = (op.mat + op.mat.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("eigendecomposition failed to converge");
  }
  return EigenDecomposition{op.basis, solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace wvsim
