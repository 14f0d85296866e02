#include "rbf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string_view>

#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"

namespace rbf {
namespace {

DenseMatrix gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix out(rows, cols);
  for (double& x : out.data()) x = normal(rng);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void fail_at(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

// Reads the "rows cols" header that opens matrix and mask files.
std::pair<std::size_t, std::size_t> read_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (fields.size() != 2 || !parse_number(fields[0], rows) || !parse_number(fields[1], cols))
      fail_at(line_no, "expected header \"rows cols\"");
    if (rows == 0 || cols == 0) fail_at(line_no, "degenerate shape " + line);
    return {rows, cols};
  }
  throw ParseError("line 1: missing header \"rows cols\"");
}

}  // namespace

PlantedProblem generate_planted(const PlantedSpec& spec) {
  if (spec.rows == 0 || spec.cols == 0) throw ArgumentError("generate_planted: empty shape");
  if (spec.rank < 1 || spec.rank > std::min(spec.rows, spec.cols))
    throw ArgumentError("generate_planted: rank outside [1, min(rows, cols)]");
  auto in_unit = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!in_unit(spec.spike_frac) || !in_unit(spec.obs_frac))
    throw ArgumentError("generate_planted: fractions must lie in [0, 1]");
  if (!(spec.magnitude >= 0.0)) throw ArgumentError("generate_planted: negative magnitude");

  std::mt19937_64 rng(spec.seed);
  PlantedProblem out;
  out.seed = spec.seed;
  for (;;) {
    const DenseMatrix a = gaussian(spec.rows, spec.rank, rng);
    const DenseMatrix b = gaussian(spec.cols, spec.rank, rng);
    out.l0 = matmul_nt(a, b);
    if (svd_thin(out.l0).rank() == spec.rank) break;
  }

  std::bernoulli_distribution spike(spec.spike_frac);
  std::bernoulli_distribution positive(0.5);
  out.s0 = DenseMatrix(spec.rows, spec.cols);
  for (double& x : out.s0.data()) {
    if (spike(rng)) x = positive(rng) ? spec.magnitude : -spec.magnitude;
  }

  std::bernoulli_distribution observe(spec.obs_frac);
  std::vector<std::uint8_t> marker(spec.rows * spec.cols);
  for (auto& m : marker) m = observe(rng) ? 1 : 0;
  out.mask = ObservationMask::from_marker(spec.rows, spec.cols, marker);
  out.d_obs = mask_project(out.l0 + out.s0, out.mask);
  return out;
}

RatingDataset generate_ratings(const SyntheticRatingSpec& spec) {
  if (spec.users == 0 || spec.items == 0) throw ArgumentError("generate_ratings: empty shape");
  if (spec.rank < 1 || spec.rank > std::min(spec.users, spec.items))
    throw ArgumentError("generate_ratings: rank outside [1, min(users, items)]");
  if (!(spec.density > 0.0 && spec.density <= 1.0))
    throw ArgumentError("generate_ratings: density must lie in (0, 1]");
  if (!(spec.noise >= 0.0)) throw ArgumentError("generate_ratings: negative noise");

  std::mt19937_64 rng(spec.seed);
  const double scale = std::pow(1.0 / static_cast<double>(spec.rank), 0.25);
  DenseMatrix a = gaussian(spec.users, spec.rank, rng) * scale;
  DenseMatrix b = gaussian(spec.items, spec.rank, rng) * scale;
  const double offset = std::sqrt(3.0);
  for (std::size_t i = 0; i < spec.users; ++i) a(i, 0) = offset;
  for (std::size_t j = 0; j < spec.items; ++j) b(j, 0) = offset;
  const DenseMatrix full = matmul_nt(a, b);

  RatingDataset out;
  out.num_users = spec.users;
  out.num_items = spec.items;
  std::bernoulli_distribution rated(spec.density);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < spec.users; ++i) {
    for (std::size_t j = 0; j < spec.items; ++j) {
      if (!rated(rng)) continue;
      const double value = full(i, j) + spec.noise * noise(rng);
      out.triplets.push_back({i, j, std::clamp(value, 1.0, 5.0)});
    }
  }
  if (out.triplets.empty()) throw ArgumentError("generate_ratings: no ratings drawn");
  split_ratings(out, spec.seed);
  return out;
}

void split_ratings(RatingDataset& data, std::uint64_t seed) {
  const std::size_t n = data.triplets.size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::mt19937_64 rng(seed);
  // Fisher–Yates with an explicit draw so the split does not depend on the
  // standard library's shuffle.
  for (std::size_t k = n; k > 1; --k) {
    const std::size_t j = static_cast<std::size_t>(rng() % k);
    std::swap(order[k - 1], order[j]);
  }
  const std::size_t test_size = n / 10;
  data.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_size));
  data.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_size), order.end());
  std::sort(data.test.begin(), data.test.end());
  std::sort(data.train.begin(), data.train.end());
}

RatingDataset parse_ratings(std::istream& in, std::uint64_t split_seed) {
  struct Raw {
    long long user;
    long long item;
    double value;
  };
  std::vector<Raw> raw;
  std::map<std::pair<long long, long long>, std::size_t> seen;
  std::size_t duplicates = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string normalized;
    normalized.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == ',') {
        normalized.push_back(' ');
      } else if (line[i] == ':' && i + 1 < line.size() && line[i + 1] == ':') {
        normalized.push_back(' ');
        ++i;
      } else {
        normalized.push_back(line[i]);
      }
    }
    auto fields = split_fields(normalized);
    if (fields.empty()) continue;
    if (fields.size() < 3 || fields.size() > 4)
      fail_at(line_no, "expected \"user item rating [timestamp]\"");
    Raw r{};
    if (!parse_number(fields[0], r.user) || !parse_number(fields[1], r.item))
      fail_at(line_no, "user and item must be integers");
    if (!parse_number(fields[2], r.value) || !std::isfinite(r.value))
      fail_at(line_no, "rating must be a finite number");

    auto [it, inserted] = seen.try_emplace({r.user, r.item}, raw.size());
    if (inserted) {
      raw.push_back(r);
    } else {
      raw[it->second].value = r.value;
      ++duplicates;
    }
  }
  if (raw.empty()) throw ArgumentError("ratings input is empty");

  std::map<long long, std::size_t> users;
  std::map<long long, std::size_t> items;
  for (const Raw& r : raw) {
    users.emplace(r.user, 0);
    items.emplace(r.item, 0);
  }
  std::size_t next = 0;
  for (auto& [id, index] : users) index = next++;
  next = 0;
  for (auto& [id, index] : items) index = next++;

  RatingDataset data;
  data.num_users = users.size();
  data.num_items = items.size();
  data.duplicates = duplicates;
  data.triplets.reserve(raw.size());
  for (const Raw& r : raw) data.triplets.push_back({users[r.user], items[r.item], r.value});
  split_ratings(data, split_seed);
  return data;
}

RatingDataset load_ratings(const std::filesystem::path& path, std::uint64_t split_seed) {
  auto in = open_in(path);
  return parse_ratings(in, split_seed);
}

RatingMatrix ratings_to_matrix(const RatingDataset& data, std::span<const std::size_t> subset) {
  DenseMatrix values(data.num_users, data.num_items);
  std::vector<ObservationMask::Entry> entries;
  entries.reserve(subset.size());
  for (std::size_t k : subset) {
    const Rating& r = data.triplets.at(k);
    values(r.user, r.item) = r.value;
    entries.emplace_back(r.user, r.item);
  }
  return {std::move(values), ObservationMask(data.num_users, data.num_items, entries)};
}

std::string format_double(double x, int digits) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, digits);
  return std::string(buf, ptr);
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ' ';
      out << format_double(row[j]);
    }
    out << '\n';
  }
}

DenseMatrix parse_matrix(std::istream& in) {
  std::size_t line_no = 0;
  const auto [rows, cols] = read_header(in, line_no);
  std::vector<double> entries;
  entries.reserve(rows * cols);
  std::string line;
  std::size_t read_rows = 0;
  while (read_rows < rows && std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != cols)
      fail_at(line_no, "expected " + std::to_string(cols) + " values, found " +
                           std::to_string(fields.size()));
    for (std::size_t j = 0; j < cols; ++j) {
      double x = 0.0;
      if (!parse_number(fields[j], x) || !std::isfinite(x))
        fail_at(line_no, "column " + std::to_string(j + 1) + ": not a finite number");
      entries.push_back(x);
    }
    ++read_rows;
  }
  if (read_rows != rows)
    throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(rows) +
                     " rows, found " + std::to_string(read_rows));
  while (std::getline(in, line)) {
    ++line_no;
    if (!split_fields(line).empty()) fail_at(line_no, "unexpected data after the last row");
  }
  return DenseMatrix(rows, cols, std::move(entries));
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_matrix(out, m);
  check_written(out, path);
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_matrix(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_mask(std::ostream& out, const ObservationMask& mask) {
  out << mask.rows() << ' ' << mask.cols() << '\n';
  for (std::size_t k : mask.flat_indices()) out << k / mask.cols() << ' ' << k % mask.cols() << '\n';
}

ObservationMask parse_mask(std::istream& in) {
  std::size_t line_no = 0;
  const auto [rows, cols] = read_header(in, line_no);
  std::vector<ObservationMask::Entry> entries;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::size_t i = 0;
    std::size_t j = 0;
    if (fields.size() != 2 || !parse_number(fields[0], i) || !parse_number(fields[1], j))
      fail_at(line_no, "expected \"i j\"");
    if (i >= rows || j >= cols) fail_at(line_no, "index out of range");
    entries.emplace_back(i, j);
  }
  try {
    return ObservationMask(rows, cols, entries);
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  }
}

void save_mask(const std::filesystem::path& path, const ObservationMask& mask) {
  auto out = open_out(path);
  write_mask(out, mask);
  check_written(out, path);
}

ObservationMask load_mask(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_mask(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<Rating> parse_triplets(std::istream& in) {
  std::vector<Rating> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    Rating r{};
    if (fields.size() != 3 || !parse_number(fields[0], r.user) || !parse_number(fields[1], r.item) ||
        !parse_number(fields[2], r.value) || !std::isfinite(r.value))
      fail_at(line_no, "expected \"i j value\"");
    out.push_back(r);
  }
  return out;
}

std::vector<Rating> load_triplets(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_triplets(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_triplets(const std::filesystem::path& path, std::span<const Rating> triplets) {
  auto out = open_out(path);
  for (const Rating& r : triplets)
    out << r.user << ' ' << r.item << ' ' << format_double(r.value) << '\n';
  check_written(out, path);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace, bool with_ratio) {
  out << "iter,residual,objective,alpha,d" << (with_ratio ? ",ratio" : "") << '\n';
  for (const TraceRecord& t : trace) {
    out << t.iter << ',' << format_double(t.residual) << ',' << format_double(t.objective) << ','
        << format_double(t.alpha) << ',' << t.rank;
    if (with_ratio) out << ',' << format_double(t.ratio);
    out << '\n';
  }
}

void save_trace_csv(const std::filesystem::path& path, std::span<const TraceRecord> trace,
                    bool with_ratio) {
  auto out = open_out(path);
  write_trace_csv(out, trace, with_ratio);
  check_written(out, path);
}

}  // namespace rbf
