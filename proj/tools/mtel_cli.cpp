// mtel — Mazur–Tate elements of elliptic curves at odd additive primes.
//
// Subcommands: info | theta | verify-table | quad-check | fit.
// Human-readable tables go to standard output; --out additionally writes a
// structured JSON mirror of every number printed.  Exit codes: 0 pass,
// 1 verification failure, 2 input/precondition error, 3 cost guard.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mtel/dataset.hpp"
#include "mtel/pipeline.hpp"
#include "mtel/report.hpp"

namespace {

struct CommonArgs {
  std::string dataset = "data/curves.mtds";
  std::string out;
  std::string cache_dir;
  int precision = 32;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& c, bool with_compute_flags) {
  cmd->add_option("--dataset", c.dataset, "Curve dataset file")
      ->capture_default_str();
  cmd->add_option("--out", c.out, "Write a structured JSON mirror of the report here");
  if (with_compute_flags) {
    cmd->add_option("--precision", c.precision,
                    "Initial p-adic working precision M (p^M); escalates automatically")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cache-dir", c.cache_dir,
                    "Directory for the versioned eigensymbol cache (empty: no cache)");
    cmd->add_option("--threads", c.threads, "Worker threads for theta evaluation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }
}

mtel::PipelineOptions make_options(const CommonArgs& c) {
  mtel::PipelineOptions opts;
  opts.precision = c.precision;
  opts.cache_dir = c.cache_dir;
  opts.threads = c.threads;
  return opts;
}

void write_out(const CommonArgs& c, const mtel::ordered_json& j) {
  if (c.out.empty()) return;
  std::ofstream os(c.out, std::ios::binary);
  if (!os) throw mtel::error(mtel::errc::io_error, "cannot open output file " + c.out);
  os << j.dump(2) << "\n";
}

// A --p override re-targets the record at a different prime (e.g. inspecting
// a good-reduction pair); the additive flag is re-derived from the conductor.
mtel::CurveRecord with_prime(const mtel::CurveRecord& rec, int64_t p) {
  if (p == 0 || p == rec.p) return rec;
  mtel::CurveRecord out = rec;
  out.p = p;
  out.additive = (out.conductor % (mtel::Int(p) * p) == 0);
  return out;
}

int run_info(const std::string& label, int64_t p, const CommonArgs& c) {
  auto records = mtel::load_dataset(c.dataset);
  auto rec = with_prime(mtel::find_record(records, label), p);
  auto rep = mtel::info_run(rec);
  mtel::info_text(rep, std::cout);
  write_out(c, mtel::info_json(rep));
  return 0;
}

int run_theta(const std::string& label, int64_t p, int n_max, int i, const CommonArgs& c) {
  auto records = mtel::load_dataset(c.dataset);
  auto rec = with_prime(mtel::find_record(records, label), p);
  auto opts = make_options(c);
  mtel::SpaceCache spaces;
  auto run = mtel::theta_run(spaces, rec.curve(), rec.p, n_max, {i}, opts);
  mtel::theta_text(run, i, std::cout);
  write_out(c, mtel::theta_json(run, i, opts.precision));
  return 0;
}

int run_verify_table(std::vector<std::string> labels, int n_max, const CommonArgs& c) {
  auto records = mtel::load_dataset(c.dataset);
  if (labels.empty()) labels = {"121c1", "968d1", "2890h1", "4232i1"};
  std::vector<mtel::CurveRecord> rows;
  rows.reserve(labels.size());
  for (const auto& l : labels) rows.push_back(mtel::find_record(records, l));
  auto opts = make_options(c);
  mtel::SpaceCache spaces;
  auto rep = mtel::verify_table_run(spaces, rows, n_max, opts);
  mtel::verify_text(rep, std::cout);
  write_out(c, mtel::verify_json(rep));
  return rep.pass ? 0 : 1;
}

int run_quad_check(const std::string& label, int i, int n_max, const CommonArgs& c) {
  auto records = mtel::load_dataset(c.dataset);
  const auto& rec = mtel::find_record(records, label);
  auto opts = make_options(c);
  mtel::SpaceCache spaces;
  auto rep = mtel::quad_check_run(spaces, rec, i, n_max, opts);
  mtel::quad_text(rep, std::cout);
  write_out(c, mtel::quad_json(rep));
  return rep.pass ? 0 : 1;
}

int run_fit(const std::string& label, int i, int n_max, const CommonArgs& c) {
  auto records = mtel::load_dataset(c.dataset);
  const auto& rec = mtel::find_record(records, label);
  auto opts = make_options(c);
  mtel::SpaceCache spaces;
  auto rep = mtel::fit_run(spaces, rec, i, n_max, opts);
  mtel::fit_text(rep, std::cout);
  write_out(c, mtel::fit_json(rep));
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mtel: Mazur-Tate elements and Iwasawa invariants of elliptic curves\n"
      "at odd primes of additive reduction"};
  app.require_subcommand(1);

  CommonArgs c_info, c_theta, c_verify, c_quad, c_fit;
  std::string label_info, label_theta, label_quad, label_fit;
  std::vector<std::string> verify_labels;
  int64_t p_info = 0, p_theta = 0;
  int n_theta = 2, n_verify = 3, n_quad = 3, n_fit = 3;
  int i_theta = 0, i_quad = 0, i_fit = 0;

  auto* info = app.add_subcommand(
      "info", "Print curve invariants, local reduction data at p, f_n and q_n");
  info->add_option("label", label_info, "Curve label in the dataset")->required();
  info->add_option("--p", p_info, "Override the record's prime");
  add_common(info, c_info, /*with_compute_flags=*/false);

  auto* theta = app.add_subcommand(
      "theta", "Compute theta_{n,i} invariants (mu, lambda) for n = 1..n_max");
  theta->add_option("label", label_theta, "Curve label in the dataset")->required();
  theta->add_option("--p", p_theta, "Override the record's prime");
  theta->add_option("--n-max", n_theta, "Largest layer n (cost guard applies)")
      ->capture_default_str();
  theta->add_option("--i", i_theta, "Character component i (omega^i)")
      ->capture_default_str();
  add_common(theta, c_theta, true);

  auto* verify = app.add_subcommand(
      "verify-table", "Verify lambda values and residual models against the dataset");
  verify->add_option("labels", verify_labels,
                     "Rows to verify (default: 121c1 968d1 2890h1 4232i1)");
  verify->add_option("--n-max", n_verify, "Cap on the verification depth")
      ->capture_default_str();
  add_common(verify, c_verify, true);

  auto* quad = app.add_subcommand(
      "quad-check", "Check the quadratic-twist lambda formula against the twist record");
  quad->add_option("label", label_quad, "Curve label (record must carry twist data)")
      ->required();
  quad->add_option("--i", i_quad, "Even character component i")->capture_default_str();
  quad->add_option("--n-max", n_quad, "Largest layer n")->capture_default_str();
  add_common(quad, c_quad, true);

  auto* fit = app.add_subcommand(
      "fit", "Fit lambda_n = a p^(n-1) + b q + parity constants and compare to the dataset");
  fit->add_option("label", label_fit, "Curve label in the dataset")->required();
  fit->add_option("--i", i_fit, "Character component i")->capture_default_str();
  fit->add_option("--n-max", n_fit, "Largest layer n")->capture_default_str();
  add_common(fit, c_fit, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (info->parsed()) return run_info(label_info, p_info, c_info);
    if (theta->parsed()) return run_theta(label_theta, p_theta, n_theta, i_theta, c_theta);
    if (verify->parsed()) return run_verify_table(verify_labels, n_verify, c_verify);
    if (quad->parsed()) return run_quad_check(label_quad, i_quad, n_quad, c_quad);
    if (fit->parsed()) return run_fit(label_fit, i_fit, n_fit, c_fit);
  } catch (const mtel::error& e) {
    std::cerr << "error (" << mtel::errc_name(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == mtel::errc::cost_guard ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
