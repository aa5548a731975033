#include "fermarkov/states.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

Matrix gaussian_matrix(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(g(rng), g(rng));
  return m;
}

StateDensity normalized(std::shared_ptr<const CarAlgebra> alg, const Matrix& m) {
  Matrix rho = hermitian_part(m);
  rho /= rho.trace().real();
  return StateDensity(std::move(alg), std::move(rho));
}

// G G^* scaled to unit normalized trace, plus delta I.
Matrix positive_from(const Matrix& g, double delta) {
  const Matrix p = g * g.adjoint();
  const double t = p.trace().real() / static_cast<double>(p.rows());
  return p / t + delta * Matrix::Identity(p.rows(), p.cols());
}

double relative_commutator(const Matrix& x, const Matrix& y) {
  return commutator(x, y).norm() / (x.norm() * y.norm());
}

constexpr double kDelta = 0.2;

}  // namespace

StateDensity random_state(int n, std::uint64_t seed, double floor) {
  auto alg = std::make_shared<const CarAlgebra>(n);
  const int dim = alg->dim();
  const double top = 1.0 / dim;
  if (!(floor > 0.0) || floor > top * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "faithfulness floor " << floor << " outside (0, 2^-n]";
    throw Error(ErrorKind::InvariantViolation, os.str());
  }
  Rng rng(seed);
  const Matrix g = gaussian_matrix(dim, rng);
  const Matrix gg = g * g.adjoint();
  const double weight = std::max(0.0, 1.0 - dim * floor);
  const Matrix rho = weight * gg / gg.trace().real() + floor * Matrix::Identity(dim, dim);
  return normalized(alg, rho);
}

StateDensity random_even_state(int n, std::uint64_t seed, double floor) {
  const StateDensity s = random_state(n, seed, floor);
  const Matrix rho = 0.5 * (s.rho() + s.alg().theta(s.rho()));
  return StateDensity(s.alg_ptr(), rho);
}

StateDensity make_product_markov(const RegionPartition& regions, std::uint64_t seed,
                                 const ProductOptions& opts) {
  auto alg = std::make_shared<const CarAlgebra>(regions.n_sites());
  const int dim = alg->dim();
  const SubalgebraBasis ab = region_subalgebra(*alg, regions.AB());
  const SubalgebraBasis c = region_subalgebra(*alg, regions.C);
  double worst = 0.0;
  for (int attempt = 0; attempt < opts.retries; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    Matrix x = Matrix::Identity(dim, dim);
    if (!opts.identity_x) x = alg->even_odd_split(positive_from(random_element(ab, rng), kDelta)).first;
    Matrix y = positive_from(random_element(c, rng), kDelta);
    if (opts.parity == ProductParity::EvenEven) y = alg->even_odd_split(y).first;
    worst = relative_commutator(x, y);
    if (worst <= 1e-10) return normalized(alg, x * y);
  }
  std::ostringstream os;
  os << "factors fail to commute (relative commutator " << worst << ")";
  throw Error(ErrorKind::CommutationFailed, os.str());
}

std::pair<StateDensity, BlockDesign> make_block_markov(const RegionPartition& regions,
                                                       std::uint64_t seed, int k_fixed,
                                                       int n_pairs) {
  if (k_fixed < 0 || n_pairs < 0 || k_fixed + n_pairs == 0) {
    throw Error(ErrorKind::InvariantViolation, "block design needs at least one block");
  }
  const int r = static_cast<int>(regions.B.size());
  const int blocks = k_fixed + 2 * n_pairs;
  if (r >= 30 || blocks > (1 << r)) {
    std::ostringstream os;
    os << blocks << " central blocks do not fit in A_B with |B| = " << r;
    throw Error(ErrorKind::RegionTooSmall, os.str());
  }
  auto alg = std::make_shared<const CarAlgebra>(regions.n_sites());
  const int dim = alg->dim();
  const Matrix id = Matrix::Identity(dim, dim);

  // Occupation patterns of all B sites but the last.
  const int n_slots = 1 << (r - 1);
  std::vector<Matrix> slots;
  for (int mask = 0; mask < n_slots; ++mask) {
    Matrix s = id;
    for (int i = 0; i + 1 < r; ++i) {
      const Matrix num = alg->number(regions.B[i]);
      s = s * (((mask >> (r - 2 - i)) & 1) ? num : Matrix(id - num));
    }
    slots.push_back(std::move(s));
  }
  const int last = regions.B.back();
  const Matrix num_last = alg->number(last);
  const Matrix u = alg->annihilator(last) + alg->creator(last);

  std::vector<Matrix> pair_groups(slots.begin(), slots.begin() + n_pairs);
  std::vector<Matrix> fixed;
  const int remaining = n_slots - n_pairs;
  const int splits = std::max(0, k_fixed - remaining);
  int next = n_pairs;
  for (int i = 0; i < splits; ++i, ++next) {
    fixed.push_back(slots[next] * num_last);
    fixed.push_back(slots[next] * (id - num_last));
  }
  while (static_cast<int>(fixed.size()) < k_fixed) fixed.push_back(slots[next++]);
  for (; next < n_slots; ++next) {
    if (!fixed.empty()) {
      fixed.back() += slots[next];
    } else {
      pair_groups.back() += slots[next];
    }
  }

  BlockDesign design;
  design.k_fixed = k_fixed;
  design.n_pairs = n_pairs;
  design.P = fixed;
  for (const Matrix& g : pair_groups) {
    design.P.push_back(g * (id + u) / 2.0);
    design.P.push_back(g * (id - u) / 2.0);
  }

  Rng rng(seed);
  const SubalgebraBasis a_alg = region_subalgebra(*alg, regions.A);
  const SubalgebraBasis bc_alg = region_subalgebra(*alg, regions.BC());
  Matrix z = Matrix::Zero(dim, dim);
  for (const Matrix& p : design.P) z += random_element(a_alg, rng) * p;
  Matrix x = alg->even_odd_split(z * z.adjoint()).first;
  x = x / (x.trace().real() / dim) + kDelta * id;
  const Matrix ybar = alg->even_odd_split(positive_from(random_element(bc_alg, rng), kDelta)).first;
  Matrix y = Matrix::Zero(dim, dim);
  for (const Matrix& p : design.P) y += p * ybar * p;
  x = hermitian_part(x);
  y = hermitian_part(y);

  const double comm = relative_commutator(x, y);
  if (comm > 1e-10) {
    std::ostringstream os;
    os << "block factors fail to commute (relative commutator " << comm << ")";
    throw Error(ErrorKind::CommutationFailed, os.str());
  }
  const double trace = (x * y).trace().real();
  design.x = x;
  design.y = y / trace;
  StateDensity state = normalized(alg, x * y);
  return {std::move(state), std::move(design)};
}

StateDensity perturb(const StateDensity& state, double epsilon, std::uint64_t seed,
                     bool keep_even) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorKind::InvariantViolation, "perturbation weight must lie in [0, 1]");
  }
  if (epsilon == 0.0) return state;
  const int n = state.n_sites();
  const double floor = 0.5 / state.alg().dim();
  const StateDensity sigma =
      keep_even ? random_even_state(n, seed, floor) : random_state(n, seed, floor);
  return StateDensity(state.alg_ptr(), (1.0 - epsilon) * state.rho() + epsilon * sigma.rho());
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Random: return "random";
    case GeneratorKind::RandomEven: return "random_even";
    case GeneratorKind::ProductMarkov: return "product_markov";
    case GeneratorKind::BlockMarkov: return "block_markov";
    case GeneratorKind::Perturbed: return "perturbed";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& text) {
  for (auto k : {GeneratorKind::Random, GeneratorKind::RandomEven, GeneratorKind::ProductMarkov,
                 GeneratorKind::BlockMarkov, GeneratorKind::Perturbed}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorKind::ParseError, "unknown generator kind '" + text + "'");
}

StateDensity generate(const GeneratorSpec& spec) {
  const int n = spec.regions.n_sites();
  const double floor = spec.floor_fraction / static_cast<double>(1 << n);
  switch (spec.kind) {
    case GeneratorKind::Random: return random_state(n, spec.seed, floor);
    case GeneratorKind::RandomEven: return random_even_state(n, spec.seed, floor);
    case GeneratorKind::ProductMarkov:
      return make_product_markov(spec.regions, spec.seed, {spec.parity, false, 5});
    case GeneratorKind::BlockMarkov:
      return make_block_markov(spec.regions, spec.seed, spec.k_fixed, spec.n_pairs).first;
    case GeneratorKind::Perturbed: {
      const StateDensity base = make_product_markov(spec.regions, derive_seed(spec.seed, 1));
      return perturb(base, spec.epsilon, derive_seed(spec.seed, 2), spec.keep_even);
    }
  }
  throw Error(ErrorKind::InvariantViolation, "unhandled generator kind");
}

}  // namespace fermarkov
