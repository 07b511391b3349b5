// stoqlab: batch experiment harness for stoquastic Merlin-Arthur verifiers.
//
// Exit codes: 0 on ACCEPT/success, 1 on REJECT or violation found, 2 on usage
// or instance errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stoqlab/cleancc.hpp"
#include "stoqlab/npcert.hpp"
#include "stoqlab/protocols.hpp"
#include "stoqlab/rectclosure.hpp"
#include "stoqlab/sepval.hpp"
#include "stoqlab/sosround.hpp"
#include "stoqlab/states.hpp"
#include "stoqlab/suite.hpp"
#include "stoqlab/verifier.hpp"

namespace {

using nlohmann::json;
using namespace stoqlab;

constexpr const char* kSchema = "stoqlab-report/1";

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << report.dump(2) << "\n";
  }
}

json base_report(const std::string& subcommand) {
  json j;
  j["schema"] = kSchema;
  j["subcommand"] = subcommand;
  return j;
}

// flat projection of a protocol run for plotting scripts
void emit_csv_row(const std::string& path, const std::string& protocol,
                  const std::string& instance, const std::string& witness, double acceptance,
                  double rejection, double ci_low, double ci_high, std::uint64_t seed) {
  const bool fresh = !std::ifstream(path).good();
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) out << "protocol,instance,witness,acceptance,rejection,ci_low,ci_high,seed\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.12g,%.12g,%.12g,%.12g,%llu", protocol.c_str(),
                instance.c_str(), witness.c_str(), acceptance, rejection, ci_low, ci_high,
                static_cast<unsigned long long>(seed));
  out << buf << "\n";
}

int default_workers() {
  if (const char* env = std::getenv("STOQLAB_WORKERS")) return std::atoi(env);
  return 0;
}

struct CommonOpts {
  std::string out;
  std::string mode = "float";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void attach_common(CLI::App* app, CommonOpts& c) {
  app->add_option("--out", c.out, "write the JSON report to this path");
  app->add_option("--mode", c.mode, "arithmetic mode: rational or float")
      ->check(CLI::IsMember({"rational", "float"}));
  app->add_option("--seed", c.seed, "random seed")->each([&c](const std::string&) {
    c.seed_set = true;
  });
}

int exit_accept(bool accept) { return accept ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for unentangled stoquastic Merlin-Arthur verifiers"};
  app.require_subcommand(1);

  // ----------------------------------------------------------------- circuit
  auto* cmd_circuit = app.add_subcommand("circuit", "apply a reversible circuit to a bit string");
  std::string circuit_path, input_bits;
  bool circuit_inverse = false;
  CommonOpts circuit_opts;
  cmd_circuit->add_option("--circuit", circuit_path, "circuit JSON")->required();
  cmd_circuit->add_option("--input", input_bits, "input bit string (qubit 0 first)")->required();
  cmd_circuit->add_flag("--inverse", circuit_inverse, "apply the inverse circuit");
  attach_common(cmd_circuit, circuit_opts);

  // ------------------------------------------------------------------ verify
  auto* cmd_verify = app.add_subcommand("verify", "acceptance probability of a verifier");
  std::string verify_verifier, verify_witness;
  CommonOpts verify_opts;
  cmd_verify->add_option("--verifier", verify_verifier, "verifier JSON")->required();
  cmd_verify->add_option("--witness", verify_witness, "witness state JSON")->required();
  attach_common(cmd_verify, verify_opts);

  // ------------------------------------------------------------------ sepval
  auto* cmd_sepval = app.add_subcommand("sepval", "separable value of a partitioned matrix");
  std::string sepval_matrix;
  int sepval_grid = 64;
  CommonOpts sepval_opts;
  cmd_sepval->add_option("--matrix", sepval_matrix, "matrix JSON")->required();
  cmd_sepval->add_option("--grid", sepval_grid, "grid resolution for 2-dim blocks");
  attach_common(cmd_sepval, sepval_opts);

  // -------------------------------------------------------------- mult-check
  auto* cmd_mult = app.add_subcommand("mult-check", "multiplicativity of separable values");
  std::string mult_a, mult_b;
  double mult_tol = 1e-4;
  CommonOpts mult_opts;
  cmd_mult->add_option("--matrix", mult_a, "first matrix JSON")->required();
  cmd_mult->add_option("--matrix2", mult_b, "second matrix JSON")->required();
  cmd_mult->add_option("--tol", mult_tol, "equality tolerance");
  attach_common(cmd_mult, mult_opts);

  // ------------------------------------------------------------ product-test
  auto* cmd_pt = app.add_subcommand("product-test", "stoquastic product test");
  int pt_k = 2, pt_ell = 1;
  std::string pt_rho, pt_sigma;
  CommonOpts pt_opts;
  cmd_pt->add_option("--k", pt_k, "number of blocks")->required();
  cmd_pt->add_option("--ell", pt_ell, "qubits per block")->required();
  cmd_pt->add_option("--rho", pt_rho, "first state JSON (k*ell qubits)");
  cmd_pt->add_option("--sigma", pt_sigma, "second state JSON");
  attach_common(cmd_pt, pt_opts);

  // -------------------------------------------------------------- symmetrize
  auto* cmd_sym = app.add_subcommand("symmetrize", "symmetric-subspace projector verifier");
  int sym_k = 2, sym_ell = 1, sym_b = 0;
  std::string sym_verifier;
  double sym_c = 1.0, sym_delta = 0.25;
  bool sym_length_efficient = false;
  CommonOpts sym_opts;
  cmd_sym->add_option("--k", sym_k, "prover count");
  cmd_sym->add_option("--ell", sym_ell, "qubits per proof");
  cmd_sym->add_option("--b", sym_b, "extra dyadic precision bits");
  cmd_sym->add_flag("--length-efficient", sym_length_efficient,
                    "length-efficient symmetrization of --verifier");
  cmd_sym->add_option("--verifier", sym_verifier, "verifier JSON (length-efficient mode)");
  cmd_sym->add_option("--completeness", sym_c, "completeness threshold c");
  cmd_sym->add_option("--delta", sym_delta, "promise gap Delta");
  attach_common(cmd_sym, sym_opts);

  // ---------------------------------------------------------------- compress
  auto* cmd_compress = app.add_subcommand("compress", "prover compression k -> 2");
  std::string compress_verifier;
  double compress_c = 1.0, compress_delta = 0.25;
  CommonOpts compress_opts;
  cmd_compress->add_option("--verifier", compress_verifier, "verifier JSON")->required();
  cmd_compress->add_option("--completeness", compress_c, "completeness threshold c");
  cmd_compress->add_option("--delta", compress_delta, "promise gap Delta");
  attach_common(cmd_compress, compress_opts);

  // ------------------------------------------------------------------ repeat
  auto* cmd_repeat = app.add_subcommand("repeat", "parallel repetition / conjunctions");
  std::vector<std::string> repeat_verifiers;
  std::string repeat_kind = "strong";
  std::int64_t repeat_n = -1;
  double repeat_b = 0;
  CommonOpts repeat_opts;
  cmd_repeat->add_option("--verifier", repeat_verifiers, "verifier JSON (repeatable)");
  cmd_repeat->add_option("--kind", repeat_kind, "weak or strong conjunction")
      ->check(CLI::IsMember({"weak", "strong"}));
  cmd_repeat->add_option("--count-n", repeat_n, "report repetitions for 2^-n soundness");
  cmd_repeat->add_option("--b", repeat_b, "soundness overlap parameter b");
  attach_common(cmd_repeat, repeat_opts);

  // --------------------------------------------------------------------- np4
  auto* cmd_np4 = app.add_subcommand("np4", "branch-local NP protocol (Paninski + consistency)");
  std::string np4_instance, np4_witness = "honest";
  int np4_K = 0;
  double np4_delta = 0.5;
  std::uint64_t np4_trials = 10000;
  CommonOpts np4_opts;
  cmd_np4->add_option("--instance", np4_instance, "GapCG JSON")->required();
  cmd_np4->add_option("--witness", np4_witness, "'honest' or state JSON path");
  cmd_np4->add_option("--K", np4_K, "number of copies (default C sqrt n with C=20)");
  cmd_np4->add_option("--delta", np4_delta, "uniformity distance parameter");
  cmd_np4->add_option("--trials", np4_trials, "Monte Carlo trials");
  std::string np4_csv;
  cmd_np4->add_option("--csv", np4_csv, "append a flat CSV row to this path");
  attach_common(cmd_np4, np4_opts);

  // --------------------------------------------------------------------- np5
  auto* cmd_np5 = app.add_subcommand("np5", "two-prover inverse-polynomial-gap NP protocol");
  std::string np5_instance, np5_witness = "honest";
  bool np5_minimize = false;
  CommonOpts np5_opts;
  cmd_np5->add_option("--instance", np5_instance, "GapCG JSON")->required();
  cmd_np5->add_option("--witness", np5_witness, "'honest' or state JSON path");
  cmd_np5->add_flag("--minimize", np5_minimize, "certified minimum rejection over witnesses");
  std::string np5_csv;
  cmd_np5->add_option("--csv", np5_csv, "append a flat CSV row to this path");
  attach_common(cmd_np5, np5_opts);

  // ---------------------------------------------------------------- birthday
  auto* cmd_birthday = app.add_subcommand("birthday", "generalized birthday paradox estimate");
  int bd_n = 365, bd_K = 23;
  std::uint64_t bd_trials = 100000;
  CommonOpts bd_opts;
  cmd_birthday->add_option("--n", bd_n, "space size (uniform distribution)");
  cmd_birthday->add_option("--K", bd_K, "samples per trial");
  cmd_birthday->add_option("--trials", bd_trials, "Monte Carlo trials");
  attach_common(cmd_birthday, bd_opts);

  // ------------------------------------------------------------ rect-closure
  auto* cmd_rect = app.add_subcommand("rect-closure", "rectangular closure testing");
  std::string rect_instance;
  double rect_gamma = 0.5;
  int rect_max_ell = 10;
  bool rect_recursive = false, rect_parallel = false;
  CommonOpts rect_opts;
  cmd_rect->add_option("--instance", rect_instance, "SepRCD instance JSON")->required();
  cmd_rect->add_option("--gamma", rect_gamma, "soundness parameter");
  cmd_rect->add_option("--max-ell", rect_max_ell, "cap on the witness length");
  cmd_rect->add_flag("--recursive", rect_recursive, "use the recursive implementation");
  cmd_rect->add_flag("--parallel-seeds", rect_parallel, "scan seeds in parallel");
  attach_common(cmd_rect, rect_opts);

  // --------------------------------------------------------------- sos-round
  auto* cmd_sos = app.add_subcommand("sos-round", "BKS rounding over a moment oracle");
  std::string sos_oracle, sos_matrix;
  double sos_eps = 0.5;
  CommonOpts sos_opts;
  cmd_sos->add_option("--oracle", sos_oracle, "moment oracle JSON")->required();
  cmd_sos->add_option("--matrix", sos_matrix, "matrix JSON (dense entries)")->required();
  cmd_sos->add_option("--epsilon", sos_eps, "target additive error");
  attach_common(cmd_sos, sos_opts);

  // ----------------------------------------------------------------- cleancc
  auto* cmd_cc = app.add_subcommand("cleancc", "CleanCC verifier evaluation");
  std::string cc_instance, cc_witness;
  bool cc_max = false;
  CommonOpts cc_opts;
  cmd_cc->add_option("--instance", cc_instance, "CleanCC JSON")->required();
  cmd_cc->add_option("--witness", cc_witness, "witness JSON: {\"subset\": [vertices]}");
  cmd_cc->add_flag("--max", cc_max, "maximum acceptance and optimal witness");
  attach_common(cmd_cc, cc_opts);

  // ------------------------------------------------------------------- suite
  auto* cmd_suite = app.add_subcommand("suite", "run the acceptance-criteria battery");
  std::string suite_only;
  CommonOpts suite_opts;
  cmd_suite->add_option("--only", suite_only, "substring filter on criterion names");
  attach_common(cmd_suite, suite_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_circuit->parsed()) {
      revsim::ReversibleCircuit c = revsim::circuit_from_json(load_json(circuit_path));
      if (circuit_inverse) c = c.inverse();
      json rep = base_report("circuit");
      rep["input"] = input_bits;
      rep["output"] = c.apply(input_bits);
      emit(rep, circuit_opts.out);
      return 0;
    }

    if (cmd_verify->parsed()) {
      const verifier::StoqVerifier v = verifier::verifier_from_json(load_json(verify_verifier));
      json rep = base_report("verify");
      const json wj = load_json(verify_witness);
      if (verify_opts.mode == "rational") {
        const states::ExactState w = states::exact_state_from_json(wj);
        const Rat acc = verifier::acceptance_probability_exact(v, w);
        rep["acceptance"] = rat_str(acc);
        rep["acceptance_float"] = to_double(acc);
      } else {
        const states::NonNegativeState w = states::state_from_json(wj);
        rep["acceptance"] = verifier::acceptance_probability(v, w);
      }
      emit(rep, verify_opts.out);
      return 0;
    }

    if (cmd_sepval->parsed()) {
      const sepval::PartitionedMatrix m = sepval::matrix_from_json(load_json(sepval_matrix));
      json rep = base_report("sepval");
      if (m.total_dim() <= 256 && m.dims.size() <= 3) {
        const sepval::HsepResult bf = sepval::hsep_bruteforce(m, sepval_grid);
        rep["bruteforce"] = {{"value", bf.value}, {"grid_error", bf.grid_error}};
      }
      if (m.entrywise_nonneg) {
        const sepval::HsepResult alt =
            sepval::hsep_alternating(m, 20, 60, sepval_opts.seed_set ? sepval_opts.seed : 1);
        rep["alternating"] = {{"value", alt.value}};
      }
      emit(rep, sepval_opts.out);
      return 0;
    }

    if (cmd_mult->parsed()) {
      const auto a = sepval::matrix_from_json(load_json(mult_a));
      const auto b = sepval::matrix_from_json(load_json(mult_b));
      const auto r =
          sepval::check_multiplicativity(a, b, mult_tol, mult_opts.seed_set ? mult_opts.seed : 1);
      json rep = base_report("mult-check");
      rep["lhs"] = r.lhs;
      rep["rhs"] = r.rhs;
      rep["tolerance"] = r.tolerance;
      rep["verdict"] = r.verdict;
      emit(rep, mult_opts.out);
      return r.verdict == "EXCESS" ? 1 : 0;
    }

    if (cmd_pt->parsed()) {
      json rep = base_report("product-test");
      const verifier::StoqVerifier pt = protocols::build_product_test(pt_k, pt_ell);
      rep["k"] = pt_k;
      rep["ell"] = pt_ell;
      rep["verifier_width"] = pt.layout.width();
      if (!pt_rho.empty() && !pt_sigma.empty()) {
        const states::NonNegativeState rho = states::state_from_json(load_json(pt_rho));
        const states::NonNegativeState sigma = states::state_from_json(load_json(pt_sigma));
        const double pp = protocols::product_test_value(states::dense_vector(rho),
                                                        states::dense_vector(sigma), pt_k, pt_ell);
        rep["p_prod"] = pp;
        rep["analytic_acceptance"] = 0.5 + 0.5 * pp;
        rep["circuit_acceptance"] =
            verifier::acceptance_probability(pt, states::tensor(rho, sigma));
      }
      emit(rep, pt_opts.out);
      return 0;
    }

    if (cmd_sym->parsed()) {
      json rep = base_report("symmetrize");
      if (sym_length_efficient) {
        if (sym_verifier.empty()) throw std::runtime_error("--verifier required");
        const verifier::StoqVerifier v = verifier::verifier_from_json(load_json(sym_verifier));
        const verifier::Thresholds th{sym_c, sym_c - sym_delta};
        const protocols::SymmetrizedVerifier sv =
            protocols::build_length_efficient_symmetrization(v, th);
        rep["plan"] = {{"k", sv.plan.k},
                       {"r", sv.plan.r},
                       {"m", sv.plan.m},
                       {"dummy_acceptance", sv.plan.dummy_acceptance}};
        rep["note"] = "verifier carries an opaque branch permutation; no gate-level JSON";
      } else {
        const protocols::SymProjectorVerifier sp =
            protocols::build_sym_projector(sym_k, sym_ell, sym_b);
        rep["plan"] = {{"k", sp.plan.k},       {"K", sp.plan.K}, {"b", sp.plan.b},
                       {"q", sp.plan.q},       {"N", sp.plan.N}, {"a", sp.plan.a},
                       {"r", sp.plan.r},       {"zeta", to_double(sp.plan.zeta)}};
        rep["verifier"] = verifier::verifier_to_json(sp.v);
      }
      emit(rep, sym_opts.out);
      return 0;
    }

    if (cmd_compress->parsed()) {
      const verifier::StoqVerifier v =
          verifier::verifier_from_json(load_json(compress_verifier));
      const verifier::Thresholds th{compress_c, compress_c - compress_delta};
      const protocols::CompressedVerifier cv = protocols::build_prover_compression(v, th);
      json rep = base_report("compress");
      rep["params"] = {{"c_prod", cv.params.c_prod},
                       {"gamma", cv.params.gamma},
                       {"lambda", cv.params.lambda},
                       {"lambda_dyadic_num", cv.params.lambda_dyadic.num},
                       {"lambda_dyadic_bits", cv.params.lambda_dyadic.bits},
                       {"truncation_error", cv.params.truncation_error}};
      rep["verifier"] = verifier::verifier_to_json(cv.w);
      emit(rep, compress_opts.out);
      return 0;
    }

    if (cmd_repeat->parsed()) {
      json rep = base_report("repeat");
      if (repeat_n >= 0) rep["repetitions"] = protocols::repetition_count(repeat_n, repeat_b);
      if (!repeat_verifiers.empty()) {
        std::vector<verifier::StoqVerifier> vs;
        for (const std::string& path : repeat_verifiers)
          vs.push_back(verifier::verifier_from_json(load_json(path)));
        const verifier::StoqVerifier combined = repeat_kind == "weak"
                                                    ? protocols::build_weak_conjunction(vs)
                                                    : protocols::build_strong_conjunction(vs);
        rep["kind"] = repeat_kind;
        rep["verifier"] = verifier::verifier_to_json(combined);
      }
      emit(rep, repeat_opts.out);
      return 0;
    }

    if (cmd_np4->parsed()) {
      if (!np4_opts.seed_set) throw std::runtime_error("--seed is mandatory for np4");
      const npcert::GapCGInstance g = npcert::gapcg_from_json(load_json(np4_instance));
      npcert::BranchDistribution p;
      if (np4_witness == "honest") {
        std::vector<int> labeling(static_cast<std::size_t>(g.n_vertices), 0);
        npcert::honest_witness(g, labeling);  // validates the labeling
        p = npcert::BranchDistribution::honest(g, labeling);
      } else {
        p = npcert::BranchDistribution::from_state(
            g, states::exact_state_from_json(load_json(np4_witness)));
      }
      const int K =
          np4_K > 0 ? np4_K
                    : static_cast<int>(std::ceil(20.0 * std::sqrt(static_cast<double>(g.n_vertices))));
      const npcert::AcceptanceEstimate est =
          npcert::protocol4_acceptance(g, p, K, np4_delta, np4_trials, np4_opts.seed);
      json rep = base_report("np4");
      rep["K"] = K;
      rep["delta"] = np4_delta;
      rep["acceptance"] = est.value;
      rep["ci_low"] = est.ci_low;
      rep["ci_high"] = est.ci_high;
      rep["exact"] = est.exact;
      rep["seed"] = np4_opts.seed;
      if (!np4_csv.empty())
        emit_csv_row(np4_csv, "np4", np4_instance, np4_witness, est.value, 1.0 - est.value,
                     est.ci_low, est.ci_high, np4_opts.seed);
      emit(rep, np4_opts.out);
      return 0;
    }

    if (cmd_np5->parsed()) {
      const npcert::GapCGInstance g = npcert::gapcg_from_json(load_json(np5_instance));
      json rep = base_report("np5");
      if (np5_minimize) {
        const npcert::MinimizeResult min = npcert::minimize_protocol5_rejection(g);
        rep["min_rejection"] = min.value;
        rep["certified"] = min.certified;
      } else {
        npcert::BranchDistribution p;
        if (np5_witness == "honest") {
          std::vector<int> labeling(static_cast<std::size_t>(g.n_vertices), 0);
          p = npcert::BranchDistribution::honest(g, labeling);
        } else {
          p = npcert::BranchDistribution::from_state(
              g, states::exact_state_from_json(load_json(np5_witness)));
        }
        const Rat rej = npcert::protocol5_rejection(g, p);
        rep["rejection"] = rat_str(rej);
        rep["rejection_float"] = to_double(rej);
        rep["stoquastic_acceptance"] = 1.0 - to_double(rej) / 2.0;
        if (!np5_csv.empty())
          emit_csv_row(np5_csv, "np5", np5_instance, np5_witness, 1.0 - to_double(rej) / 2.0,
                       to_double(rej), to_double(rej), to_double(rej), np5_opts.seed);
      }
      emit(rep, np5_opts.out);
      return 0;
    }

    if (cmd_birthday->parsed()) {
      if (!bd_opts.seed_set) throw std::runtime_error("--seed is mandatory for birthday");
      std::vector<double> mu(static_cast<std::size_t>(bd_n), 1.0 / bd_n);
      std::vector<bool> omega0(static_cast<std::size_t>(bd_n), true);
      const npcert::BirthdayResult r = npcert::birthday_mc(
          mu, [](int a, int b) { return a == b; }, omega0, bd_K, bd_trials, bd_opts.seed);
      json rep = base_report("birthday");
      rep["estimate"] = r.estimate;
      rep["ci_low"] = r.ci_low;
      rep["ci_high"] = r.ci_high;
      rep["exact_uniform_oracle"] = npcert::birthday_exact_uniform(bd_n, bd_K);
      rep["seed"] = bd_opts.seed;
      emit(rep, bd_opts.out);
      return 0;
    }

    if (cmd_rect->parsed()) {
      const rectclosure::SepRcdInstance inst =
          rectclosure::instance_from_json(load_json(rect_instance));
      if (inst.ell > rect_max_ell) throw std::runtime_error("instance exceeds --max-ell");
      const rectclosure::RectClosureVerdict v =
          rect_recursive
              ? rectclosure::rect_closure_test_recursive(inst, rect_gamma)
              : rectclosure::rect_closure_test(inst, rect_gamma, -1, rect_parallel,
                                               default_workers());
      json rep = base_report("rect-closure");
      rep["verdict"] = rectclosure::verdict_to_json(v);
      emit(rep, rect_opts.out);
      return exit_accept(v.accept);
    }

    if (cmd_sos->parsed()) {
      const sosround::MomentOracle o = sosround::oracle_from_json(load_json(sos_oracle));
      const json mj = load_json(sos_matrix);
      const auto rows = mj.at("entries").get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd m(rows.size(), rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t cc2 = 0; cc2 < rows.size(); ++cc2)
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cc2)) = rows[r][cc2];
      const sosround::RoundingResult r = sosround::bks_round_loop(m, o, sos_eps);
      json rep = base_report("sos-round");
      rep["value"] = r.value;
      rep["final_oracle_value"] = r.final_oracle_value;
      std::vector<double> x(r.x.data(), r.x.data() + r.x.size());
      rep["x"] = x;
      rep["trace"] = json::array();
      for (const auto& e : r.trace)
        rep["trace"].push_back(
            {{"pinning", e.pinning}, {"hellinger", e.hellinger}, {"entropy", e.entropy}});
      emit(rep, sos_opts.out);
      return 0;
    }

    if (cmd_cc->parsed()) {
      const cleancc::CleanCcInstance inst = cleancc::cleancc_from_json(load_json(cc_instance));
      json rep = base_report("cleancc");
      rep["soundness_bound"] = cleancc::soundness_bound(inst.n, inst.dG);
      if (cc_max) {
        const cleancc::MaxAcceptance mx = cleancc::max_acceptance(inst);
        rep["max_acceptance"] = mx.value;
        rep["optimal_witness"] = mx.witness.alpha;
      }
      if (!cc_witness.empty()) {
        const json wj = load_json(cc_witness);
        const std::vector<int> support = wj.at("subset").get<std::vector<int>>();
        rep["acceptance"] = rat_str(cleancc::acceptance_exact_subset(inst, support));
      }
      emit(rep, cc_opts.out);
      return 0;
    }

    if (cmd_suite->parsed()) {
      suite::SuiteConfig cfg;
      if (suite_opts.seed_set) cfg.seed = suite_opts.seed;
      cfg.only = suite_only;
      const auto results = suite::run_acceptance_suite(cfg, std::cout);
      bool all = !results.empty();
      json rep = base_report("suite");
      rep["criteria"] = json::array();
      for (const auto& r : results) {
        all &= r.pass;
        rep["criteria"].push_back({{"id", r.id},
                                   {"name", r.name},
                                   {"pass", r.pass},
                                   {"detail", r.detail},
                                   {"seconds", r.seconds}});
      }
      if (!suite_opts.out.empty()) emit(rep, suite_opts.out);
      return all ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
