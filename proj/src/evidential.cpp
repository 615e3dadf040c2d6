#include "shelfmem/evidential.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "shelfmem/errors.hpp"

namespace shelfmem {

std::vector<double> dirichlet_expectation(std::span<const double> lambdas) {
  double s = 0.0;
  for (const double l : lambdas) s += l;
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) out[i] = lambdas[i] / s;
  return out;
}

double dirichlet_uncertainty(std::span<const double> lambdas) {
  double s = 0.0;
  for (const double l : lambdas) s += l;
  return static_cast<double>(lambdas.size()) / s;
}

int hard_label(std::span<const double> lambdas) {
  int best = 0;
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (lambdas[i] > lambdas[best]) best = static_cast<int>(i);
  return best;
}

void fuse_semantic(std::span<double> lambdas, int cls, double weight) {
  if (cls < 0 || cls >= static_cast<int>(lambdas.size()))
    throw ContractError("fuse_semantic: class index out of range");
  if (!(weight > 0.0)) throw ContractError("fuse_semantic: weight must be > 0");
  lambdas[cls] += weight;
}

BeliefState::BeliefState(const GridSpec& spec)
    : spec_(spec),
      occ_(spec.rows, spec.cols, spec.levels, BetaParams{}),
      sem_(static_cast<std::size_t>(spec.cell_count()) * spec.n_classes, 1.0) {}

void BeliefState::reset_cell_to_prior(int r, int c) {
  for (int k = 0; k < spec_.levels; ++k) occ_.at(r, c, k) = BetaParams{};
  auto sem = semantic(r, c);
  std::fill(sem.begin(), sem.end(), 1.0);
}

UncertaintyMaps BeliefState::uncertainty_maps() const {
  UncertaintyMaps maps{Grid2<double>(spec_.rows, spec_.cols),
                       Grid2<double>(spec_.rows, spec_.cols)};
  for (int r = 0; r < spec_.rows; ++r) {
    for (int c = 0; c < spec_.cols; ++c) {
      double vmax = 0.0;
      for (const BetaParams p : occ_.column(r, c))
        vmax = std::max(vmax, beta_variance(p));
      maps.occupancy.at(r, c) = vmax;
      maps.semantic.at(r, c) = dirichlet_uncertainty(semantic(r, c));
    }
  }
  return maps;
}

double BeliefState::mean_occupancy_uncertainty() const {
  double s = 0.0;
  for (const BetaParams p : occ_.data()) s += beta_variance(p);
  return s / static_cast<double>(occ_.data().size());
}

double BeliefState::mean_semantic_uncertainty() const {
  double s = 0.0;
  for (int r = 0; r < spec_.rows; ++r)
    for (int c = 0; c < spec_.cols; ++c) s += dirichlet_uncertainty(semantic(r, c));
  return s / spec_.cell_count();
}

Grid2<double> BeliefState::project_height_map(double theta_occ) const {
  Grid2<double> h(spec_.rows, spec_.cols, 0.0);
  for (int r = 0; r < spec_.rows; ++r) {
    for (int c = 0; c < spec_.cols; ++c) {
      const auto col = occ_.column(r, c);
      for (int k = spec_.levels - 1; k >= 0; --k) {
        if (beta_mean(col[k]) >= theta_occ) {
          h.at(r, c) = (k + 1) * spec_.resolution;
          break;
        }
      }
    }
  }
  return h;
}

Grid2<double> BeliefState::column_max_mean() const {
  Grid2<double> m(spec_.rows, spec_.cols, 0.0);
  for (int r = 0; r < spec_.rows; ++r) {
    for (int c = 0; c < spec_.cols; ++c) {
      double best = 0.0;
      for (const BetaParams p : occ_.column(r, c)) best = std::max(best, beta_mean(p));
      m.at(r, c) = best;
    }
  }
  return m;
}

Grid2<int> BeliefState::hard_label_map() const {
  Grid2<int> labels(spec_.rows, spec_.cols, 0);
  for (int r = 0; r < spec_.rows; ++r)
    for (int c = 0; c < spec_.cols; ++c) labels.at(r, c) = hard_label(semantic(r, c));
  return labels;
}

namespace {

constexpr char kMagic[8] = {'S', 'M', 'B', 'E', 'L', 'F', '0', '1'};

template <typename T>
void put(std::vector<std::uint8_t>& out, const T& v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T take(const std::uint8_t*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

}  // namespace

std::vector<std::uint8_t> BeliefState::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(64 + occ_.data().size() * 16 + sem_.size() * 8);
  out.insert(out.end(), kMagic, kMagic + 8);
  put<std::int32_t>(out, spec_.rows);
  put<std::int32_t>(out, spec_.cols);
  put<std::int32_t>(out, spec_.levels);
  put<std::int32_t>(out, spec_.n_classes);
  put<double>(out, spec_.resolution);
  for (const BetaParams p : occ_.data()) {
    put<double>(out, p.alpha);
    put<double>(out, p.beta);
  }
  for (const double l : sem_) put<double>(out, l);
  return out;
}

void BeliefState::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

BeliefState BeliefState::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 8 + 4 * 4 + 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw IoError("not a belief file: " + path.string());
  const std::uint8_t* p = bytes.data() + 8;
  GridSpec spec;
  spec.rows = take<std::int32_t>(p);
  spec.cols = take<std::int32_t>(p);
  spec.levels = take<std::int32_t>(p);
  spec.n_classes = take<std::int32_t>(p);
  spec.resolution = take<double>(p);
  BeliefState b(spec);
  const std::size_t expected =
      8 + 16 + 8 + b.occ_.data().size() * 16 + b.sem_.size() * 8;
  if (bytes.size() != expected) throw IoError("truncated belief file: " + path.string());
  for (BetaParams& q : b.occ_.data()) {
    q.alpha = take<double>(p);
    q.beta = take<double>(p);
  }
  for (double& l : b.sem_) l = take<double>(p);
  return b;
}

}  // namespace shelfmem
