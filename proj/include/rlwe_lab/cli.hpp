#pragma once

// Command-line front end. Exit codes: 0 ok, 1 usage error, 2 runtime error.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlwe_lab/attack.hpp"
#include "rlwe_lab/crypto.hpp"
#include "rlwe_lab/experiment.hpp"
#include "rlwe_lab/io.hpp"
#include "rlwe_lab/lattice.hpp"
#include "rlwe_lab/report.hpp"
#include "rlwe_lab/ring.hpp"
#include "rlwe_lab/rng.hpp"
#include "rlwe_lab/stats.hpp"

namespace rlwe_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

namespace detail {

inline std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

inline void print_attack_result(std::ostream& out, const AttackResult& r) {
  out << "success=" << (r.success ? "true" : "false") << '\n';
  out << "failure_kind=" << to_string(r.failure) << '\n';
  out << std::setprecision(9) << "time_s=" << r.wall_time_s << '\n';
  out << "shortest_norm=" << r.shortest_norm << '\n';
  out << "root_hermite=" << std::setprecision(12) << r.root_hermite << '\n';
  if (r.recovered_error) {
    out << "e=" << join(r.recovered_error->e) << '\n';
    out << "e_prime=" << join(r.recovered_error->e_prime) << '\n';
  }
  if (r.recovered_secret) out << "secret=" << join(*r.recovered_secret) << '\n';
}

inline void print_summary(std::ostream& out, const SweepReport& rep) {
  out << "degree trials successes rate mean_time_s\n";
  for (const auto& s : rep.per_degree)
    out << s.degree << ' ' << s.trials << ' ' << s.successes << ' ' << std::setprecision(4) << s.success_rate << ' '
        << std::setprecision(6) << s.mean_time_s << '\n';
}

}  // namespace detail

/// Runs one invocation; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ring-LWE embedding attack lab", "rlwe_lab"};
  app.require_subcommand(1);

  // keygen
  std::size_t kg_degree = 32;
  std::int64_t kg_q = kDefaultModulus;
  double kg_sigma = kDefaultSigma;
  std::uint64_t kg_seed = 0;
  std::int64_t kg_M = 1;
  std::string kg_out;
  auto* keygen_cmd = app.add_subcommand("keygen", "Generate a key pair (two RLWE samples and a binary secret)");
  keygen_cmd->add_option("--degree", kg_degree, "Ring degree d")->required()->check(CLI::PositiveNumber);
  keygen_cmd->add_option("--q", kg_q, "Modulus (odd prime)")->capture_default_str();
  keygen_cmd->add_option("--sigma", kg_sigma, "Error standard deviation")->capture_default_str();
  keygen_cmd->add_option("--seed", kg_seed, "RNG seed")->capture_default_str();
  keygen_cmd->add_option("--M", kg_M, "Embedding constant stored in the instance")->capture_default_str();
  keygen_cmd->add_option("--out", kg_out, "Key pair file")->required();

  // encrypt
  std::string enc_key, enc_msg, enc_out;
  std::uint64_t enc_seed = 0;
  double enc_sigma = kDefaultSigma;
  auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a bit string with a key pair's public samples");
  encrypt_cmd->add_option("--key", enc_key, "Key pair file")->required();
  encrypt_cmd->add_option("--message", enc_msg, "Plaintext file (d bits); random when omitted");
  encrypt_cmd->add_option("--seed", enc_seed, "RNG seed")->capture_default_str();
  encrypt_cmd->add_option("--sigma", enc_sigma, "Noise standard deviation")->capture_default_str();
  encrypt_cmd->add_option("--out", enc_out, "Ciphertext file")->required();

  // decrypt
  std::string dec_key, dec_in;
  auto* decrypt_cmd = app.add_subcommand("decrypt", "Decrypt a ciphertext with a key pair's secret");
  decrypt_cmd->add_option("--key", dec_key, "Key pair file")->required();
  decrypt_cmd->add_option("--in", dec_in, "Ciphertext file")->required();

  // attack
  std::string at_instance;
  double at_delta = 0.99;
  std::optional<std::int64_t> at_M;
  bool at_exact = false;
  auto* attack_cmd = app.add_subcommand("attack", "Run the embedding attack on a stored instance");
  attack_cmd->add_option("--instance", at_instance, "Instance or key pair file")->required();
  attack_cmd->add_option("--delta", at_delta, "LLL parameter")->capture_default_str();
  attack_cmd->add_option("--M", at_M, "Override the embedding constant");
  attack_cmd->add_flag("--exact", at_exact, "Use exact rational LLL throughout");

  // reduce
  std::string rd_basis, rd_out;
  double rd_delta = 0.99;
  bool rd_exact = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "LLL-reduce a basis file");
  reduce_cmd->add_option("--basis", rd_basis, "Basis file")->required();
  reduce_cmd->add_option("--delta", rd_delta, "LLL parameter")->capture_default_str();
  reduce_cmd->add_option("--out", rd_out, "Write the reduced basis here instead of standard output");
  reduce_cmd->add_flag("--exact", rd_exact, "Use exact rational LLL throughout");

  // sweep
  std::vector<std::size_t> sw_degrees;
  SweepConfig sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run attack trials over a list of degrees");
  sweep_cmd->add_option("--degrees", sw_degrees, "Comma-separated degrees")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--trials", sw.trials_per_degree, "Trials per degree")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sw.master_seed, "Master seed")->capture_default_str();
  sweep_cmd->add_option("--q", sw.q, "Modulus")->capture_default_str();
  sweep_cmd->add_option("--sigma", sw.sigma, "Error standard deviation")->capture_default_str();
  sweep_cmd->add_option("--delta", sw.delta, "LLL parameter")->capture_default_str();
  sweep_cmd->add_option("--out", sw.output_path, "CSV output file");
  sweep_cmd->add_option("--jobs", sw.jobs, "Worker threads (0 = all hardware threads)")->capture_default_str();

  // report
  std::string rp_in, rp_compare = "none", rp_alt = "two-sided";
  auto* report_cmd = app.add_subcommand("report", "Summarise a sweep CSV as Markdown");
  report_cmd->add_option("--in", rp_in, "Sweep CSV")->required();
  report_cmd->add_option("--compare", rp_compare, "Comparison to run")
      ->check(CLI::IsMember({"none", "primes-vs-rest"}))
      ->capture_default_str();
  report_cmd->add_option("--alternative", rp_alt, "Alternative hypothesis for Mann-Whitney")
      ->check(CLI::IsMember({"two-sided", "less", "greater"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (*keygen_cmd) {
      const RingContext ctx(kg_degree, kg_q);
      Rng rng = make_rng(kg_seed);
      KeyPair kp = keygen(ctx, rng, GaussianParams(kg_sigma), kg_M);
      kp.pub.seed = kg_seed;
      auto f = open_output(kg_out);
      write_keypair(f, kp);
      out << "wrote key pair d=" << kg_degree << " q=" << kg_q << " to " << kg_out << '\n';
    } else if (*encrypt_cmd) {
      auto kf = open_input(enc_key);
      const KeyPair kp = read_keypair(kf);
      Rng rng = make_rng(enc_seed);
      Plaintext m;
      if (enc_msg.empty()) {
        m = sample_plaintext(kp.pub.ctx, rng);
        out << "message=";
        write_plaintext(out, m);
      } else {
        auto mf = open_input(enc_msg);
        m = read_plaintext(mf, kp.pub.degree());
      }
      const Ciphertext c = encrypt(kp.pub, m, rng, GaussianParams(enc_sigma));
      auto f = open_output(enc_out);
      write_ciphertext(f, c);
    } else if (*decrypt_cmd) {
      auto kf = open_input(dec_key);
      const KeyPair kp = read_keypair(kf);
      auto cf = open_input(dec_in);
      const Ciphertext c = read_ciphertext(cf, kp.pub.ctx);
      write_plaintext(out, decrypt(kp.secret, c));
    } else if (*attack_cmd) {
      auto f = open_input(at_instance);
      AttackInstance inst = read_instance(f);
      if (at_M) inst.embedding_M = *at_M;
      LllParams p(at_delta);
      p.validate();
      if (at_exact) p.arithmetic = LllArithmetic::exact;
      detail::print_attack_result(out, attack(inst, p));
    } else if (*reduce_cmd) {
      auto f = open_input(rd_basis);
      const auto basis = read_basis(f);
      LllParams p(rd_delta);
      p.validate();
      if (rd_exact) p.arithmetic = LllArithmetic::exact;
      const auto reduced = lll_reduce(basis, p);
      if (rd_out.empty()) {
        write_basis(out, reduced);
      } else {
        auto o = open_output(rd_out);
        write_basis(o, reduced);
      }
    } else if (*sweep_cmd) {
      std::sort(sw_degrees.begin(), sw_degrees.end());
      sw_degrees.erase(std::unique(sw_degrees.begin(), sw_degrees.end()), sw_degrees.end());
      sw.degrees = sw_degrees;
      const SweepReport rep = run_sweep(sw);
      detail::print_summary(out, rep);
    } else if (*report_cmd) {
      auto f = open_input(rp_in);
      const SweepReport rep = aggregate(read_csv(f));
      const Alternative alt = rp_alt == "less"      ? Alternative::less
                              : rp_alt == "greater" ? Alternative::greater
                                                    : Alternative::two_sided;
      write_report(out, rep, rp_compare == "primes-vs-rest" ? Comparison::primes_vs_rest : Comparison::none, alt);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace rlwe_lab::cli
