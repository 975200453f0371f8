#pragma once

// Trial protocol: per degree, N independent trials of
// keygen -> encrypt -> attack -> decrypt-with-recovered-key.
// Trials run on a small worker pool; finished records go through a queue to
// one writer that streams CSV rows as they arrive.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "rlwe_lab/attack.hpp"
#include "rlwe_lab/crypto.hpp"
#include "rlwe_lab/lattice.hpp"
#include "rlwe_lab/ring.hpp"
#include "rlwe_lab/rng.hpp"

namespace rlwe_lab {

inline constexpr std::int64_t kDefaultModulus = 1997;
inline constexpr std::size_t kDefaultTrials = 100;

struct TrialParams {
  std::int64_t q = kDefaultModulus;
  double sigma = kDefaultSigma;
  LllParams lll{};
  std::int64_t embedding_M = 1;
};

struct TrialRecord {
  std::size_t degree = 0;
  std::size_t trial = 0;
  bool success = false;
  FailureKind failure = FailureKind::none;
  double time_s = 0.0;
  double root_hermite = 0.0;
  std::uint64_t seed = 0;
  std::optional<IntVector> recovered_secret;  // not persisted to CSV
};

inline std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t degree, std::size_t trial) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(degree), static_cast<std::uint64_t>(trial)});
}

/// Called at the start of every trial; throwing from it simulates a worker
/// fault. The trial is then recorded as internal_error.
using FaultInjector = std::function<void(std::size_t degree, std::size_t trial)>;

/// One trial. Never throws: any failure inside the pipeline becomes a record
/// with the matching failure kind.
inline TrialRecord run_trial(std::size_t degree, const TrialParams& params, std::uint64_t seed,
                             std::size_t trial_index = 0, const FaultInjector& fault = {}) {
  TrialRecord rec;
  rec.degree = degree;
  rec.trial = trial_index;
  rec.seed = seed;
  try {
    if (fault) fault(degree, trial_index);
    const RingContext ctx(degree, params.q);
    const GaussianParams gauss(params.sigma);
    Rng rng = make_rng(seed);
    KeyPair kp = keygen(ctx, rng, gauss, params.embedding_M);
    kp.pub.seed = seed;
    const Plaintext m = sample_plaintext(ctx, rng);
    const Ciphertext c = encrypt(kp.pub, m, rng, gauss);
    const AttackResult res = attack(kp.pub, params.lll);
    rec.time_s = res.wall_time_s;
    rec.root_hermite = res.root_hermite;
    rec.recovered_secret = res.recovered_secret;
    rec.failure = res.failure;
    if (res.recovered_secret && res.failure == FailureKind::none) {
      rec.success = attack_succeeds(kp, m, c, res);
      if (!rec.success) rec.failure = FailureKind::wrong_key;
    }
  } catch (const BudgetExhaustedError&) {
    rec.success = false;
    rec.failure = FailureKind::budget_exhausted;
  } catch (const std::exception&) {
    rec.success = false;
    rec.failure = FailureKind::internal_error;
  }
  return rec;
}

struct SweepConfig {
  std::vector<std::size_t> degrees;
  std::int64_t q = kDefaultModulus;
  double sigma = kDefaultSigma;
  std::size_t trials_per_degree = kDefaultTrials;
  double delta = 0.99;
  std::uint64_t master_seed = 0;
  std::string output_path;  // empty: keep results in memory only
  unsigned jobs = 0;        // 0: one worker per hardware thread
  FaultInjector fault;

  void validate() const {
    if (degrees.empty()) throw std::invalid_argument("sweep needs at least one degree");
    if (!std::is_sorted(degrees.begin(), degrees.end()))
      throw std::invalid_argument("sweep degrees must be sorted ascending");
    if (std::adjacent_find(degrees.begin(), degrees.end()) != degrees.end())
      throw std::invalid_argument("sweep degrees must be distinct");
    if (degrees.front() == 0) throw std::invalid_argument("degrees must be positive");
    if (trials_per_degree == 0) throw std::invalid_argument("trials per degree must be at least 1");
    (void)RingContext(1, q);
    (void)GaussianParams(sigma);
    LllParams(delta).validate();
  }

  TrialParams trial_params() const {
    TrialParams p;
    p.q = q;
    p.sigma = sigma;
    p.lll = LllParams(delta);
    return p;
  }
};

struct DegreeSummary {
  std::size_t degree = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_time_s = 0.0;                      // over all trials
  std::optional<double> mean_success_time_s;     // over successful trials only
};

struct SweepReport {
  std::vector<DegreeSummary> per_degree;  // ascending degree
  std::vector<TrialRecord> records;       // sorted by (degree, trial)

  const DegreeSummary& at(std::size_t degree) const {
    for (const auto& s : per_degree)
      if (s.degree == degree) return s;
    throw std::out_of_range("no results for degree " + std::to_string(degree));
  }
};

/// Per-degree success rate and mean time. Throws on empty input.
inline SweepReport aggregate(std::vector<TrialRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  std::sort(records.begin(), records.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return std::tie(a.degree, a.trial) < std::tie(b.degree, b.trial); });
  SweepReport report;
  std::map<std::size_t, std::vector<const TrialRecord*>> by_degree;
  for (const auto& r : records) by_degree[r.degree].push_back(&r);
  for (const auto& [degree, recs] : by_degree) {
    DegreeSummary s;
    s.degree = degree;
    s.trials = recs.size();
    double total = 0.0, success_total = 0.0;
    for (const auto* r : recs) {
      total += r->time_s;
      if (r->success) {
        ++s.successes;
        success_total += r->time_s;
      }
    }
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
    s.mean_time_s = total / static_cast<double>(s.trials);
    if (s.successes > 0) s.mean_success_time_s = success_total / static_cast<double>(s.successes);
    report.per_degree.push_back(s);
  }
  report.records = std::move(records);
  return report;
}

// --- CSV ------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "degree,trial,success,failure_kind,time_s,root_hermite,seed";

inline void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

inline void write_csv_row(std::ostream& out, const TrialRecord& r) {
  std::ostringstream line;
  line << r.degree << ',' << r.trial << ',' << (r.success ? 1 : 0) << ',' << to_string(r.failure) << ','
       << std::setprecision(9) << r.time_s << ',' << std::setprecision(12) << r.root_hermite << ',' << r.seed
       << '\n';
  out << line.str();
}

inline std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("unexpected results header: '" + line + "'");
  std::vector<TrialRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 7) throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7 fields");
    try {
      TrialRecord r;
      r.degree = std::stoul(f[0]);
      r.trial = std::stoul(f[1]);
      if (f[2] != "0" && f[2] != "1") throw std::invalid_argument("success must be 0 or 1");
      r.success = f[2] == "1";
      r.failure = failure_kind_from_string(f[3]);
      r.time_s = std::stod(f[4]);
      r.root_hermite = std::stod(f[5]);
      r.seed = std::stoull(f[6]);
      if (r.success && r.failure != FailureKind::none)
        throw std::invalid_argument("successful trial with failure kind " + f[3]);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// --- sweep ----------------------------------------------------------------

inline unsigned resolve_jobs(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs every (degree, trial) pair. Results are identical for any job count;
/// only completion order (and hence CSV row order) differs.
inline SweepReport run_sweep(const SweepConfig& cfg, const std::function<void(const TrialRecord&)>& on_record = {}) {
  cfg.validate();
  std::optional<std::ofstream> csv;
  if (!cfg.output_path.empty()) {
    csv.emplace(cfg.output_path);
    if (!*csv) throw std::runtime_error("cannot open '" + cfg.output_path + "' for writing");
    write_csv_header(*csv);
    csv->flush();
  }

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (auto d : cfg.degrees)
    for (std::size_t t = 0; t < cfg.trials_per_degree; ++t) tasks.emplace_back(d, t);

  const TrialParams params = cfg.trial_params();
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::condition_variable ready;
  std::deque<TrialRecord> queue;
  std::size_t running = resolve_jobs(cfg.jobs);
  running = std::min(running, tasks.size());

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto [degree, trial] = tasks[i];
      TrialRecord rec = run_trial(degree, params, trial_seed(cfg.master_seed, degree, trial), trial, cfg.fault);
      {
        std::lock_guard lock(mu);
        queue.push_back(std::move(rec));
      }
      ready.notify_one();
    }
    {
      std::lock_guard lock(mu);
      --running;
    }
    ready.notify_one();
  };

  std::vector<std::jthread> pool;
  const std::size_t n_workers = running;
  pool.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);

  std::vector<TrialRecord> records;
  records.reserve(tasks.size());
  std::exception_ptr writer_error;
  while (true) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return !queue.empty() || running == 0; });
    if (queue.empty() && running == 0) break;
    TrialRecord rec = std::move(queue.front());
    queue.pop_front();
    lock.unlock();
    if (csv && !writer_error) {
      write_csv_row(*csv, rec);
      csv->flush();
      if (!*csv) writer_error = std::make_exception_ptr(std::runtime_error("write to '" + cfg.output_path + "' failed"));
    }
    if (on_record) on_record(rec);
    records.push_back(std::move(rec));
  }
  pool.clear();
  if (writer_error) std::rethrow_exception(writer_error);
  return aggregate(std::move(records));
}

}  // namespace rlwe_lab
