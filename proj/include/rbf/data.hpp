#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rbf/dense_matrix.hpp"
#include "rbf/measurement.hpp"
#include "rbf/solver_config.hpp"

namespace rbf {

// ---------------------------------------------------------------------------
// Planted low-rank + sparse instances

struct PlantedSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 1;
  double spike_frac = 0.0;
  double magnitude = 1.0;
  double obs_frac = 1.0;
  std::uint64_t seed = 0;
};

struct PlantedProblem {
  DenseMatrix l0;        // product of Gaussian factors, rank exactly `rank`
  DenseMatrix s0;        // ±magnitude on a Bernoulli(spike_frac) support
  ObservationMask mask;  // Bernoulli(obs_frac) per entry
  DenseMatrix d_obs;     // P_Ω(l0 + s0)
  std::uint64_t seed = 0;
};

/// Deterministic in spec.seed. Throws ArgumentError for rank outside
/// [1, min(rows, cols)] or fractions outside [0, 1].
PlantedProblem generate_planted(const PlantedSpec& spec);

// ---------------------------------------------------------------------------
// Rating data

struct Rating {
  std::size_t user;
  std::size_t item;
  double value;
};

struct RatingDataset {
  std::vector<Rating> triplets;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t duplicates = 0;       // (user, item) pairs overwritten during ingestion
  std::vector<std::size_t> train;   // indices into triplets, sorted
  std::vector<std::size_t> test;
};

struct SyntheticRatingSpec {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t rank = 5;
  double density = 0.3;  // fraction of (user, item) pairs that carry a rating
  double noise = 0.0;    // standard deviation of additive Gaussian noise
  std::uint64_t seed = 0;
};

/// Ratings drawn from a rank-`rank` matrix around 3 (one factor pair holds
/// the constant offset), plus noise, clipped to [1, 5]. The result is
/// already split with the same seed.
RatingDataset generate_ratings(const SyntheticRatingSpec& spec);

/// Seeded 9:1 partition: ⌊N/10⌋ test triplets, the rest train.
void split_ratings(RatingDataset& data, std::uint64_t seed);

/// Parses "user item rating [timestamp]" lines separated by whitespace,
/// commas or "::". External ids are remapped to dense 0-based indices in
/// increasing id order; a repeated (user, item) keeps the last rating.
/// Throws ParseError (with line number) or ArgumentError for an empty input.
RatingDataset parse_ratings(std::istream& in, std::uint64_t split_seed);
RatingDataset load_ratings(const std::filesystem::path& path, std::uint64_t split_seed);

/// Dense observation matrix and mask built from a subset of the triplets.
struct RatingMatrix {
  DenseMatrix values;
  ObservationMask mask;
};
RatingMatrix ratings_to_matrix(const RatingDataset& data, std::span<const std::size_t> subset);

// ---------------------------------------------------------------------------
// Text formats

/// Locale-independent shortest form with at most `digits` significant digits.
std::string format_double(double x, int digits = 17);

/// "rows cols" header, then one line of space-separated values per row.
void write_matrix(std::ostream& out, const DenseMatrix& m);
DenseMatrix parse_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_matrix(const std::filesystem::path& path);

/// "rows cols" header, then one "i j" line per observed entry (0-based).
void write_mask(std::ostream& out, const ObservationMask& mask);
ObservationMask parse_mask(std::istream& in);
void save_mask(const std::filesystem::path& path, const ObservationMask& mask);
ObservationMask load_mask(const std::filesystem::path& path);

/// Headerless "i j value" lines (0-based), e.g. a held-out test set.
std::vector<Rating> parse_triplets(std::istream& in);
std::vector<Rating> load_triplets(const std::filesystem::path& path);
void save_triplets(const std::filesystem::path& path, std::span<const Rating> triplets);

/// CSV with header iter,residual,objective,alpha,d and, when
/// `with_ratio`, a trailing ratio column.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace, bool with_ratio);
void save_trace_csv(const std::filesystem::path& path, std::span<const TraceRecord> trace,
                    bool with_ratio);

}  // namespace rbf
