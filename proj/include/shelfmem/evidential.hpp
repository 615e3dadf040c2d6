#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "shelfmem/grid.hpp"

namespace shelfmem {

/// Beta pseudo-counts over a voxel's occupancy. alpha counts occupied
/// evidence, beta counts free evidence; the unit prior is (1, 1).
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

enum class OccEvidence : std::uint8_t { miss = 0, hit = 1 };

inline double beta_mean(BetaParams p) { return p.alpha / (p.alpha + p.beta); }

inline double beta_variance(BetaParams p) {
  const double s = p.alpha + p.beta;
  return p.alpha * p.beta / (s * s * (s + 1.0));
}

inline BetaParams fuse_occupancy(BetaParams p, OccEvidence e, double weight) {
  if (e == OccEvidence::hit)
    p.alpha += weight;
  else
    p.beta += weight;
  return p;
}

/// Per-class Dirichlet evidence for one footprint cell.
struct DirichletParams {
  std::vector<double> lambdas;
};

std::vector<double> dirichlet_expectation(std::span<const double> lambdas);
double dirichlet_uncertainty(std::span<const double> lambdas);

/// Argmax class; ties resolve to the lowest index.
int hard_label(std::span<const double> lambdas);

/// Adds `weight` evidence for class `cls`. Throws ContractError when the
/// class index is out of range or the weight is not positive.
void fuse_semantic(std::span<double> lambdas, int cls, double weight);

/// Prior-variance of Beta(1,1); the maximum occupancy uncertainty reachable
/// from the unit prior under additive evidence.
inline constexpr double kPriorOccVariance = 1.0 / 12.0;

struct UncertaintyMaps {
  Grid2<double> occupancy;  // per cell: max Beta variance over the column
  Grid2<double> semantic;   // per cell: N / sum(lambda)
};

/// Paired evidential grids: a 3D Beta-occupancy voxel map and a 2D
/// Dirichlet-semantic cell map on the same footprint. Semantic evidence is
/// stored flat (n_classes doubles per cell).
class BeliefState {
 public:
  BeliefState() = default;
  explicit BeliefState(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }

  BetaParams occupancy(int r, int c, int k) const { return occ_.at(r, c, k); }
  void set_occupancy(int r, int c, int k, BetaParams p) { occ_.at(r, c, k) = p; }
  std::span<const BetaParams> occupancy_column(int r, int c) const {
    return occ_.column(r, c);
  }

  std::span<const double> semantic(int r, int c) const {
    return {&sem_[sem_index(r, c)], static_cast<std::size_t>(spec_.n_classes)};
  }
  std::span<double> semantic(int r, int c) {
    return {&sem_[sem_index(r, c)], static_cast<std::size_t>(spec_.n_classes)};
  }

  void fuse_occupancy_at(int r, int c, int k, OccEvidence e, double weight) {
    occ_.at(r, c, k) = shelfmem::fuse_occupancy(occ_.at(r, c, k), e, weight);
  }
  void fuse_semantic_at(int r, int c, int cls, double weight) {
    shelfmem::fuse_semantic(semantic(r, c), cls, weight);
  }

  void reset_cell_to_prior(int r, int c);

  UncertaintyMaps uncertainty_maps() const;

  double mean_occupancy_uncertainty() const;  // mean voxel variance
  double mean_semantic_uncertainty() const;   // mean cell N/S

  /// Height (meters) of the topmost voxel with mean >= theta_occ, per cell;
  /// 0 where no voxel passes the threshold.
  Grid2<double> project_height_map(double theta_occ) const;

  /// 2D occupancy proxy: max Beta mean over each column.
  Grid2<double> column_max_mean() const;

  /// Per-cell argmax class of the semantic evidence.
  Grid2<int> hard_label_map() const;

  void save(const std::filesystem::path& path) const;
  static BeliefState load(const std::filesystem::path& path);
  std::vector<std::uint8_t> serialize() const;

  const Grid3<BetaParams>& occupancy_grid() const { return occ_; }
  Grid3<BetaParams>& occupancy_grid() { return occ_; }
  std::span<const double> semantic_data() const { return sem_; }
  std::span<double> semantic_data() { return sem_; }

  friend bool operator==(const BeliefState&, const BeliefState&) = default;

 private:
  std::size_t sem_index(int r, int c) const {
    return (static_cast<std::size_t>(r) * spec_.cols + c) * spec_.n_classes;
  }

  GridSpec spec_;
  Grid3<BetaParams> occ_;
  std::vector<double> sem_;
};

}  // namespace shelfmem
