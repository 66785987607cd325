// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "unemap/macrocluster.hpp"
#include "unemap/mca.hpp"
#include "unemap/metrics.hpp"
#include "unemap/som.hpp"
#include "unemap/text_io.hpp"
#include "unemap/transitions.hpp"

using namespace unemap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int decimals = 4) { return text::format_fixed(v, decimals); }

// ---- transitions

// Total shares in percent, rows = origin, columns = destination.
constexpr std::array<std::array<double, 4>, 4> kRegistrationToExit = {{
    {20.73, 1.21, 4.81, 8.33},
    {29.33, 1.57, 5.95, 9.95},
    {4.94, 0.18, 0.86, 1.05},
    {8.36, 0.41, 0.98, 1.32},
}};
constexpr std::array<std::array<double, 4>, 4> kExitToRegistration = {{
    {27.08, 41.20, 4.58, 5.37},
    {0.86, 0.68, 0.06, 0.18},
    {7.83, 4.86, 0.55, 0.72},
    {3.05, 2.21, 0.27, 0.48},
}};

TransitionTable from_shares(const std::array<std::array<double, 4>, 4>& shares, Direction d) {
  Grid4<std::uint64_t> counts{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) counts[i][j] = static_cast<std::uint64_t>(std::llround(shares[i][j] * 100));
  return table_from_counts(counts, d);
}

Outcome transition_arithmetic() {
  const auto start = Clock::now();
  const auto t3 = from_shares(kRegistrationToExit, Direction::registration_to_exit);
  const auto t4 = from_shares(kExitToRegistration, Direction::exit_to_registration);
  struct Expect {
    const TransitionTable* table;
    int from, to;
    double row_share;
  };
  const Expect expected[] = {{&t3, 1, 1, 59.08}, {&t3, 2, 1, 62.67}, {&t4, 1, 1, 34.62}};
  bool ok = true;
  std::string detail;
  for (const auto& e : expected) {
    const double got = e.table->row_share[e.from - 1][e.to - 1];
    const bool cell_ok = std::abs(got - e.row_share) <= 0.02;
    ok = ok && cell_ok;
    detail += "(" + std::to_string(e.from) + "," + std::to_string(e.to) + ")=" + fmt(got, 2) +
              (cell_ok ? " " : "! ");
  }
  const double elapsed = seconds_since(start);
  return {ok && elapsed < 1.0, detail + fmt(elapsed, 3) + "s"};
}

std::string cells_text(const std::vector<Cell>& cells) {
  std::vector<std::string> parts;
  for (const auto& c : cells) parts.push_back("(" + std::to_string(c.from) + "," + std::to_string(c.to) + ")");
  std::sort(parts.begin(), parts.end());
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out + "}";
}

Outcome significant_cell_recovery() {
  const auto start = Clock::now();
  const auto t3 = from_shares(kRegistrationToExit, Direction::registration_to_exit);
  const auto t4 = from_shares(kExitToRegistration, Direction::exit_to_registration);
  const std::string got3 = cells_text(significant_cells(t3, 8.0));
  const std::string got4 = cells_text(significant_cells(t4, 4.5));
  const std::string want3 = "{(1,1),(1,4),(2,1),(2,4),(4,1)}";
  const std::string want4 = "{(1,1),(1,2),(3,1),(3,2)}";
  const double elapsed = seconds_since(start);
  const bool ok = got3 == want3 && got4 == want4 && elapsed < 1.0;
  return {ok, "registration->exit " + got3 + (got3 == want3 ? "" : " want " + want3) +
                  "; exit->registration " + got4 + (got4 == want4 ? "" : " want " + want4) + " " +
                  fmt(elapsed, 3) + "s"};
}

// ---- SOM

Outcome planted_cluster_recovery() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const auto planted = oracle::gaussian_clusters(2000, 5, 10, 6.0, rng);
  const GridTopology grid{10, 10};
  const auto trained =
      train(init_map(grid, 10, planted.data, InitStrategy::pca_plane, 1), planted.data, TrainingSchedule{});
  const auto a = assign(trained, planted.data);
  const auto w = ward(trained.codebook, {}, 5);
  std::vector<int> found(planted.label.size());
  for (std::size_t i = 0; i < found.size(); ++i) found[i] = w.partition.label[a.unit[i]];
  const double ari = adjusted_rand_index(found, planted.label);
  const double elapsed = seconds_since(start);
  return {ari >= 0.9 && elapsed < 10.0, "ARI " + fmt(ari) + " " + fmt(elapsed, 2) + "s"};
}

Outcome distortion_monotonicity() {
  const double plateaus[] = {4.0, 2.0, 1.0, 0.5, 0.0};
  std::size_t checks = 0, violations = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto data = oracle::random_matrix(200, 3, rng);
    auto m = init_map({8, 8}, 3, data, InitStrategy::random_sample, seed);
    for (double sigma : plateaus) {
      double prev = oracle::brute_distortion(m, data, sigma);
      for (int e = 0; e < 4; ++e) {
        batch_epoch(m, data, sigma);
        const double now = oracle::brute_distortion(m, data, sigma);
        ++checks;
        const double rise = (now - prev) / prev;
        worst = std::max(worst, rise);
        if (rise > 1e-9) ++violations;
        prev = now;
      }
    }
  }
  return {violations == 0, std::to_string(checks) + " epoch steps, " + std::to_string(violations) +
                               " increases, largest relative increase " + text::format_double(worst, 3)};
}

Outcome kmeans_limit() {
  std::mt19937_64 rng(5);
  std::size_t mismatches = 0, trials = 0;
  for (int trial = 0; trial < 30; ++trial, ++trials) {
    const std::size_t n = 20 + rng() % 181;
    const auto x = oracle::random_matrix(n, 3, rng);
    const GridTopology grid{2 + rng() % 3, 2 + rng() % 3};
    const auto init = init_map(grid, 3, x, InitStrategy::random_sample, rng());
    const auto ref = oracle::lloyd(x, init.codebook);
    TrainingSchedule s;
    s.radius_start = s.radius_end = 0.0;
    s.epochs = ref.iterations + 2;
    const auto trained = train(init, x, s);
    if (assign(trained, x).unit != ref.assignment) ++mismatches;
  }
  return {mismatches == 0, std::to_string(trials) + " instances, " + std::to_string(mismatches) +
                               " assignment mismatches"};
}

Outcome topology_preservation() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix data(2000, 2);
  for (auto& v : data.values()) v = u(rng);
  const auto trained = train(init_map({10, 10}, 2, data, InitStrategy::pca_plane, 1), data, TrainingSchedule{});
  const double te = topographic_error(trained, data);
  return {te <= 0.15, "topographic error " + fmt(te)};
}

// ---- Ward

Outcome ward_oracle() {
  std::mt19937_64 rng(77);
  std::size_t mismatched = 0, non_monotone = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const auto x = oracle::random_matrix(n, 1 + rng() % 4, rng);
    std::vector<double> w;
    if (trial % 2) {
      w.resize(n);
      for (auto& v : w) v = 1.0 + static_cast<double>(rng() % 9);
    }
    const auto d = ward_linkage(x, w);
    const auto ref = oracle::naive_ward(x, w);
    bool same = d.merges.size() == ref.size();
    for (std::size_t t = 0; same && t < ref.size(); ++t)
      same = d.merges[t].a == ref[t].a && d.merges[t].b == ref[t].b && d.merges[t].size == ref[t].size &&
             std::abs(d.merges[t].cost - ref[t].cost) <= 1e-9 * std::max(1.0, std::abs(ref[t].cost));
    if (!same) ++mismatched;
    for (std::size_t t = 1; t < d.merges.size(); ++t)
      if (d.merges[t].cost < d.merges[t - 1].cost) {
        ++non_monotone;
        break;
      }
  }
  return {mismatched == 0 && non_monotone == 0,
          "50 instances, " + std::to_string(mismatched) + " differ from the naive linkage, " +
              std::to_string(non_monotone) + " with decreasing costs"};
}

// ---- MCA

Outcome mca_identities() {
  std::mt19937_64 rng(88);
  double worst_sum = 0.0, worst_eig = 0.0, worst_coord = 0.0;
  std::size_t oracle_cases = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t q = 2 + rng() % 3;
    std::vector<std::size_t> mods;
    std::size_t j = 0;
    for (std::size_t v = 0; v < q; ++v) {
      mods.push_back(2 + rng() % (trial < 40 ? 3 : 5));
      j += mods.back();
    }
    const std::size_t n = trial < 40 ? 10 + rng() % 91 : 200 + rng() % 800;
    const auto ind = indicator(oracle::random_table(n, mods, rng));
    const std::size_t kept = static_cast<std::size_t>(
        std::count_if(ind.column_counts.begin(), ind.column_counts.end(), [](std::size_t c) { return c > 0; }));
    const auto r = fit_mca(ind, kept - q);
    const double sum = std::accumulate(r.eigenvalues.begin(), r.eigenvalues.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(sum - static_cast<double>(kept - q) / static_cast<double>(q)));

    if (n > 100 || j > 12 || kept != j) continue;
    ++oracle_cases;
    const auto ref = oracle::dense_mca(ind.z, q);
    for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
      worst_eig = std::max(worst_eig, std::abs(r.eigenvalues[k] - ref.eigenvalues[k]));
      const double gap_prev = k == 0 ? 1.0 : r.eigenvalues[k - 1] - r.eigenvalues[k];
      const double gap_next = k + 1 < r.eigenvalues.size() ? r.eigenvalues[k] - r.eigenvalues[k + 1] : 1.0;
      if (std::min(gap_prev, gap_next) < 1e-5 || r.eigenvalues[k] < 1e-10) continue;
      double dot = 0.0;
      for (std::size_t c = 0; c < j; ++c) dot += r.column_coordinates(c, k) * ref.column_coordinates(c, k);
      const double sign = dot < 0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < j; ++c)
        worst_coord = std::max(worst_coord,
                               std::abs(r.column_coordinates(c, k) - sign * ref.column_coordinates(c, k)));
    }
  }

  CategoricalTable perfect;
  perfect.variables = {"A", "B"};
  perfect.modalities = {{"a", "b", "c"}, {"x", "y", "z"}};
  for (int i = 0; i < 90; ++i) perfect.codes.push_back({i % 3, i % 3});
  const double lead = fit_mca(indicator(perfect), 1).eigenvalues.front();

  const bool ok = worst_sum <= 1e-8 && worst_eig <= 1e-8 && worst_coord <= 1e-8 && std::abs(lead - 1.0) <= 1e-8;
  return {ok, "trace error " + text::format_double(worst_sum, 3) + ", oracle eigenvalue error " +
                  text::format_double(worst_eig, 3) + ", coordinate error " + text::format_double(worst_coord, 3) +
                  " over " + std::to_string(oracle_cases) + " oracle cases, perfect association " +
                  text::format_double(lead, 12)};
}

// ---- end-to-end pipeline through the command-line tool

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text::read_file(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(text::split_fields(line, ','));
  return rows;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = haystack.find(needle); p != std::string::npos; p = haystack.find(needle, p + 1)) ++n;
  return n;
}

fs::path work_dir() { return fs::temp_directory_path() / "unemap_acceptance"; }

int run_cli(const fs::path& out) {
  const fs::path ini = work_dir() / "cohort.ini";
  std::ofstream(ini) << "[run]\nseed = 1\n\n[synthetic]\nn = 19246\n\n[output]\ndir = " << out.string() << "\n";
  const std::string cmd = std::string(UNEMAP_CLI_PATH) + " all -c " + ini.string() + " > " +
                          (work_dir() / (out.filename().string() + ".log")).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr std::array<double, 5> kPlantedCounts = {7908, 3793, 4519, 877, 2149};

Outcome full_size_pipeline() {
  const fs::path out = work_dir() / "run_a";
  fs::remove_all(out);
  const auto start = Clock::now();
  const int status = run_cli(out);
  const double elapsed = seconds_since(start);
  if (status != 0) return {false, "unemap all exited with status " + std::to_string(status)};

  std::array<double, 5> emitted{};
  double total = 0;
  for (const auto& row : read_csv(out / "class_counts.csv")) {
    const auto c = text::parse_int(row.at(0)), r = text::parse_int(row.at(2));
    if (c && r && *c >= 1 && *c <= 5) emitted[static_cast<std::size_t>(*c - 1)] = static_cast<double>(*r);
    if (r) total += static_cast<double>(*r);
  }

  std::map<std::string, int> planted;
  for (const auto& row : read_csv(out / "truth.csv")) planted[row.at(0)] = static_cast<int>(*text::parse_int(row.at(1)));
  std::array<std::array<double, 5>, 5> overlap{};
  for (const auto& row : read_csv(out / "record_classes.csv")) {
    const int found = static_cast<int>(*text::parse_int(row.at(2)));
    const int truth = planted.at(row.at(0));
    overlap[static_cast<std::size_t>(found - 1)][static_cast<std::size_t>(truth - 1)] += 1;
  }
  std::array<int, 5> perm = {0, 1, 2, 3, 4}, best = perm;
  double best_overlap = -1;
  do {
    double s = 0;
    for (std::size_t c = 0; c < 5; ++c) s += overlap[c][static_cast<std::size_t>(perm[c])];
    if (s > best_overlap) best_overlap = s, best = perm;
  } while (std::next_permutation(perm.begin(), perm.end()));

  const double planted_total = std::accumulate(kPlantedCounts.begin(), kPlantedCounts.end(), 0.0);
  double worst = 0;
  std::string shares;
  for (std::size_t c = 0; c < 5; ++c) {
    const double got = 100.0 * emitted[c] / total;
    const double want = 100.0 * kPlantedCounts[static_cast<std::size_t>(best[c])] / planted_total;
    worst = std::max(worst, std::abs(got - want));
    shares += (c ? " " : "") + fmt(got, 2) + "/" + fmt(want, 2);
  }

  std::string planes;
  bool planes_ok = true;
  for (const char* f : {"fig_mca_1_2.svg", "fig_mca_1_3.svg"}) {
    const std::size_t points = fs::exists(out / f) ? count_of(text::read_file(out / f), "<circle class=\"modality\"") : 0;
    planes_ok = planes_ok && points == 32;
    planes += " " + std::string(f) + "=" + std::to_string(points);
  }

  const bool ok = elapsed < 60.0 && total == 19246 && worst <= 2.0 && planes_ok;
  return {ok, fmt(elapsed, 1) + "s, records " + text::format_double(total, 6) + ", shares found/planted " +
                  shares + " (max gap " + fmt(worst, 2) + "pp), points" + planes};
}

std::map<std::string, std::string> artifacts(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "timings.json") files[e.path().filename().string()] = text::read_file(e.path());
  return files;
}

Outcome determinism() {
  const fs::path a = work_dir() / "run_a", b = work_dir() / "run_b";
  if (!fs::exists(a / "manifest.json") && run_cli(a) != 0) return {false, "first run failed"};
  fs::remove_all(b);
  if (run_cli(b) != 0) return {false, "second run failed"};
  const auto fa = artifacts(a), fb = artifacts(b);
  std::vector<std::string> differing;
  for (const auto& [name, body] : fa)
    if (!fb.contains(name) || fb.at(name) != body) differing.push_back(name);
  for (const auto& [name, _] : fb)
    if (!fa.contains(name)) differing.push_back(name);
  std::string detail = std::to_string(fa.size()) + " files compared";
  if (!differing.empty()) detail += ", differing: " + text::join(differing, ' ');
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  fs::create_directories(work_dir());
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"transition arithmetic", transition_arithmetic},
      {"significant cells", significant_cell_recovery},
      {"planted clusters", planted_cluster_recovery},
      {"distortion monotonicity", distortion_monotonicity},
      {"k-means limit", kmeans_limit},
      {"topology preservation", topology_preservation},
      {"Ward oracle", ward_oracle},
      {"MCA identities", mca_identities},
      {"full-size pipeline", full_size_pipeline},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-24s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                seconds_since(start), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
