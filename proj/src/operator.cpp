#include "sctop/operator.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <Eigen/LU>

#include "sctop/errors.hpp"
#include "sctop/kernels.hpp"

namespace sctop {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'C', 'T', 'O', 'P', 'M', 'A', 'T'};

static_assert(std::endian::native == std::endian::little,
              "operator dump assumes a little-endian host");

// Solves (I - L)_{nz,nz} h_nz = L_{nz,0} on the nonzero frequencies, keeping
// the polished vector only if it lowers the residual.
FourierDensity polish_fixed_density(const OperatorMatrix& op, const FourierDensity& h) {
  const auto dim = op.entries.rows();
  const auto zero = op.index(0);
  std::vector<Eigen::Index> nz;
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (r != zero) nz.push_back(r);
  }
  const Eigen::MatrixXcd system =
      Eigen::MatrixXcd::Identity(dim - 1, dim - 1) - op.entries(nz, nz);
  const Eigen::VectorXcd rhs = op.entries(nz, Eigen::seqN(zero, 1));
  const Eigen::VectorXcd solution = Eigen::PartialPivLU<Eigen::MatrixXcd>(system).solve(rhs);
  FourierDensity polished = h;
  polished.coeffs()(nz) = solution;
  polished.symmetrize();
  const double before = max_coefficient_distance(apply_operator(op, h), h);
  const double after = max_coefficient_distance(apply_operator(op, polished), polished);
  return after <= before ? polished : h;
}

}  // namespace

OperatorMatrix assemble_transfer(std::span<const double> map_samples, std::size_t order,
                                 std::string provenance) {
  OperatorMatrix op;
  op.order = order;
  op.entries = kernels::parallel::transfer_matrix(map_samples, order);
  op.provenance = std::move(provenance);
  return op;
}

FourierDensity apply_operator(const OperatorMatrix& op, const FourierDensity& h) {
  if (op.order != h.order()) {
    throw InvalidArgument("apply_operator: operator order " + std::to_string(op.order) +
                          " differs from density order " + std::to_string(h.order()));
  }
  FourierDensity out(h.order(), h.is_real());
  out.coeffs().noalias() = op.entries * h.coeffs();
  if (out.is_real()) out.symmetrize();
  return out;
}

FourierDensity leading_fixed_density(const OperatorMatrix& op, FixedDensityOptions options) {
  if (!(options.tolerance > 0.0) || options.max_iterations == 0) {
    throw InvalidArgument("leading_fixed_density: tolerance must be > 0 and max_iterations >= 1");
  }
  FourierDensity h = FourierDensity::uniform(op.order);
  double residual = INFINITY;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    FourierDensity next = apply_operator(op, h);
    next[0] = 1.0;
    residual = max_coefficient_distance(next, h);
    h = std::move(next);
    if (residual <= options.tolerance) return options.polish ? polish_fixed_density(op, h) : h;
  }
  throw ConvergenceError("leading_fixed_density: no convergence after " +
                             std::to_string(options.max_iterations) + " iterations",
                         options.max_iterations, residual);
}

void write_operator(const OperatorMatrix& op, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  const std::uint64_t n = op.order;
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  const Eigen::Index dim = op.entries.rows();
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const std::array<double, 2> pair = {op.entries(r, c).real(), op.entries(r, c).imag()};
      out.write(reinterpret_cast<const char*>(pair.data()), sizeof(pair));
    }
  }
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

OperatorMatrix read_operator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::array<char, 8> magic{};
  std::uint64_t n = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || magic != kMagic || n == 0) {
    throw InvalidArgument(path.string() + " is not an operator dump");
  }
  OperatorMatrix op;
  op.order = static_cast<std::size_t>(n);
  const auto dim = static_cast<Eigen::Index>(2 * n);
  op.entries.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      std::array<double, 2> pair{};
      in.read(reinterpret_cast<char*>(pair.data()), sizeof(pair));
      op.entries(r, c) = Complex(pair[0], pair[1]);
    }
  }
  if (!in) throw InvalidArgument(path.string() + " is truncated");
  op.provenance = "file:" + path.filename().string();
  return op;
}

}  // namespace sctop
