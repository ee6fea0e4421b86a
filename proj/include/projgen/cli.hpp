#pragma once

// Command-line driver: construct | verify | closure | sweep | pgen.
// Exit codes: 0 pass, 1 verification failure, 2 parse error,
// 3 precondition error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "projgen/algebra.hpp"
#include "projgen/construction.hpp"
#include "projgen/document.hpp"
#include "projgen/errors.hpp"
#include "projgen/pgen.hpp"

namespace projgen::cli {

enum ExitCode : int { kPass = 0, kVerificationFailed = 1, kParseError = 2, kPreconditionError = 3 };

struct Flags {
  std::optional<std::size_t> k;
  std::optional<double> epsilon;
  std::string grid;
  std::string report;
  std::string out;
  std::optional<double> tol_proj;
  std::optional<double> tol_rank;
  std::optional<std::size_t> max_dim;
  bool timing = false;
};

namespace detail {

inline std::string read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot read input file '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw precondition_error("cannot write '" + path + "'");
  out << text;
}

inline Tolerances tolerances(const Flags& flags, const DocumentOptions& doc) {
  Tolerances tol;
  if (doc.tol_projection) tol.projection = *doc.tol_projection;
  if (doc.tol_rank) tol.rank = *doc.tol_rank;
  if (flags.tol_proj) tol.projection = *flags.tol_proj;
  if (flags.tol_rank) tol.rank = *flags.tol_rank;
  return tol;
}

inline json lemma_json(const LemmaCertificate& c) {
  json j;
  j["eta"] = c.eta;
  j["dominance_margin"] = c.dominance_margin;
  j["lambda_min"] = c.lambda_min;
  j["lambda_max"] = c.lambda_max;
  j["interval"] = {c.interval_low, c.interval_high};
  j["norm_T_minus_1"] = c.norm_T_minus_1;
  j["bound_T_minus_1"] = c.bound_T;
  j["norm_inv_sqrt_minus_1"] = c.norm_inv_sqrt_minus_1;
  j["bound_inv_sqrt_minus_1"] = c.bound_inv_sqrt;
  j["passed"] = c.passed;
  if (!c.violation.empty()) j["violation"] = c.violation;
  return j;
}

inline json bounds_json(const BoundsReport& r) {
  json j;
  j["eta"] = r.eta;
  j["lemma_interval"] = {r.lemma_low, r.lemma_high};
  j["spectrum"] = {r.lambda_min, r.lambda_max};
  j["norm_T_minus_1"] = r.norm_T_minus_1;
  j["norm_inv_sqrt_minus_1"] = r.norm_inv_sqrt_minus_1;
  j["max_projection_residual"] = r.max_projection_residual;
  j["sum_identity_residual"] = r.sum_identity_residual;
  j["pairwise_products"] = r.pairwise_products;
  j["distances_to_units"] = r.distances_to_units;
  j["max_pairwise_product"] = r.max_pairwise_product;
  j["max_distance_to_unit"] = r.max_distance_to_unit;
  j["bound_16"] = r.bound_16;
  j["bound_8"] = r.bound_8;
  j["checks"] = {{"spectrum", r.spectrum_pass},     {"norm", r.norm_pass},
                 {"inv_sqrt", r.inv_sqrt_pass},     {"invertible", r.invertible_pass},
                 {"projection", r.projection_pass}, {"sum", r.sum_pass},
                 {"pairwise", r.pairwise_pass},     {"distance", r.distance_pass}};
  j["all_pass"] = r.all_pass;
  return j;
}

inline json equivalence_json(const EquivalenceReport& e) {
  return {{"max_unitarity_residual", e.max_unitarity_residual},
          {"max_conjugation_residual", e.max_conjugation_residual},
          {"pass", e.pass}};
}

inline json generation_json(const GenerationReport& g) {
  json failed = json::array();
  for (const auto& m : g.memberships)
    if (!m.member) failed.push_back({{"element", m.label}, {"residual", m.residual}});
  return {{"family_dim", g.family_closure_dim},
          {"source_dim", g.source_closure_dim},
          {"expected_dim", g.expected_dim},
          {"dims_match", g.dims_match},
          {"memberships_checked", g.memberships.size()},
          {"memberships_failed", failed},
          {"pass", g.pass}};
}

// Flattens nested objects into "a.b: value" lines.
inline void text_lines(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      text_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

inline void emit(const json& report, const Flags& flags, std::ostream& out) {
  if (flags.report == "text") {
    text_lines(report, "", out);
  } else {
    out << report.dump(2) << "\n";
  }
}

inline std::vector<double> parse_grid(const std::string& grid) {
  std::vector<double> out;
  if (grid.empty()) return out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw parse_error("");
      return v;
    } catch (const std::exception&) {
      throw parse_error("bad grid value '" + s + "'");
    }
  };
  if (grid.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(grid);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw parse_error("grid must be a:b:n or a comma list");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double n = number(parts[2]);
    if (n < 0 || n != static_cast<double>(static_cast<long long>(n))) {
      throw parse_error("grid point count must be a nonnegative integer");
    }
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(count == 1 ? a : a + (b - a) * double(i) / double(count - 1));
    }
    return out;
  }
  std::stringstream ss(grid);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline PipelineOptions pipeline_options(const Flags& flags, const InputDocument& doc) {
  PipelineOptions opts;
  opts.k = flags.k ? flags.k : doc.options.k;
  opts.epsilon = flags.epsilon ? flags.epsilon : doc.options.epsilon;
  opts.tol = tolerances(flags, doc.options);
  return opts;
}

}  // namespace detail

inline int cmd_construct(const std::string& input, const Flags& flags, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::string text = detail::read_input(input);
  const InputDocument doc = parse_document(text);
  const PipelineResult r = run_pipeline(doc.generator_set(), detail::pipeline_options(flags, doc));

  json report;
  report["command"] = "construct";
  report["input_digest"] = digest(text);
  report["dimension"] = doc.dimension;
  report["generator_count"] = r.prepared.source_count();
  report["delta_n"] = r.delta_n;
  report["k"] = r.k;
  report["epsilon"] = r.epsilon;
  report["lemma"] = detail::lemma_json(r.lemma);
  report["bounds"] = detail::bounds_json(r.bounds);
  report["equivalence"] = detail::equivalence_json(r.equivalence);
  report["generation"] = detail::generation_json(*r.generation);
  report["verdict"] = r.pass ? "pass" : "fail";

  if (!flags.out.empty()) {
    InputDocument proj;
    proj.dimension = r.k * doc.dimension;
    proj.generators = r.family.projections;
    proj.options.k = r.k;
    proj.options.epsilon = r.epsilon;
    proj.source = doc.generator_set();
    detail::write_file(flags.out, document_to_json(proj).dump() + "\n");
    report["projections_file"] = flags.out;
  }
  if (flags.timing) {
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  detail::emit(report, flags, out);
  return r.pass ? kPass : kVerificationFailed;
}

/// Re-verifies a projection file written by construct --out.
inline int cmd_verify(const std::string& input, const Flags& flags, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::string text = detail::read_input(input);
  const InputDocument doc = parse_document(text);
  const std::size_t k = flags.k ? *flags.k : doc.options.k.value_or(doc.generators.size());
  if (!flags.epsilon && !doc.options.epsilon) {
    throw precondition_error("verify: epsilon missing (options.epsilon or --epsilon)");
  }
  const double epsilon = flags.epsilon ? *flags.epsilon : *doc.options.epsilon;
  const Tolerances tol = detail::tolerances(flags, doc.options);

  const ProjectionFamily f = recover_family(doc.generators, k, epsilon);
  const LemmaCertificate lemma = lemma_certificate(f.source.blocks, tol.slack);
  const BoundsReport bounds = verify_family(f, tol);
  const EquivalenceReport eq =
      check_equivalence(f.projections, f.diagonal_units, f.source.block_dim, tol);
  bool pass = lemma.passed && bounds.all_pass && eq.pass;

  json report;
  report["command"] = "verify";
  report["input_digest"] = digest(text);
  report["dimension"] = doc.dimension;
  report["k"] = k;
  report["epsilon"] = epsilon;
  report["lemma"] = detail::lemma_json(lemma);
  report["bounds"] = detail::bounds_json(bounds);
  report["equivalence"] = detail::equivalence_json(eq);
  if (doc.source) {
    const GenerationReport g = check_generation(f, *doc.source, tol);
    report["generation"] = detail::generation_json(g);
    pass = pass && g.pass;
  }
  report["verdict"] = pass ? "pass" : "fail";
  if (flags.timing) {
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  detail::emit(report, flags, out);
  return pass ? kPass : kVerificationFailed;
}

inline int cmd_closure(const std::string& input, const Flags& flags, std::ostream& out) {
  const std::string text = detail::read_input(input);
  const InputDocument doc = parse_document(text);
  const Tolerances tol = detail::tolerances(flags, doc.options);
  ClosureOptions opts;
  opts.rank_tol = tol.rank;
  opts.dim_cap = flags.max_dim.value_or(0);
  opts.throw_on_cap = false;

  const GeneratorSet g = doc.generator_set();
  const StarClosure raw = star_closure(g.generators, opts);
  const StarClosure unital = star_closure(unitize(g).generators, opts);
  const std::size_t full = doc.dimension * doc.dimension;

  json report;
  report["command"] = "closure";
  report["input_digest"] = digest(text);
  report["dimension"] = doc.dimension;
  report["generator_count"] = doc.generators.size();
  report["closure_dim"] = raw.dimension();
  report["unitized_closure_dim"] = unital.dimension();
  report["full_algebra_dim"] = full;
  report["full_algebra"] = unital.dimension() == full;
  report["saturated"] = raw.saturated && unital.saturated;
  report["verdict"] = raw.saturated && unital.saturated ? "pass" : "fail";
  detail::emit(report, flags, out);
  return raw.saturated && unital.saturated ? kPass : kVerificationFailed;
}

inline int cmd_sweep(const std::string& input, const Flags& flags, std::ostream& out) {
  const std::string text = detail::read_input(input);
  const InputDocument doc = parse_document(text);
  const std::vector<double> grid = detail::parse_grid(flags.grid);
  PipelineOptions base = detail::pipeline_options(flags, doc);
  base.check_generation = false;

  const GeneratorSet g = doc.generator_set();
  const std::size_t n = normalize(g).generators.size();
  const std::size_t k = base.k.value_or(delta(n));
  if (k < delta(n)) throw precondition_error("sweep: k below delta(n)");
  for (double eps : grid) {
    if (!(eps > 0.0 && eps < max_admissible_epsilon(k))) {
      throw precondition_error("sweep: grid point " + detail::format_double(eps) +
                               " outside (0, 1/(8(k-1)))");
    }
  }

  std::vector<std::future<PipelineResult>> rows;
  for (double eps : grid) {
    PipelineOptions opts = base;
    opts.k = k;
    opts.epsilon = eps;
    rows.push_back(std::async(std::launch::async, [g, opts] { return run_pipeline(g, opts); }));
  }

  std::ostringstream csv;
  csv << "epsilon,max_pair_product,max_distance_to_unit,lambda_min,bound_16,bound_8,"
         "pair_pass,distance_pass,pass\n";
  bool all = true;
  for (auto& fut : rows) {
    const PipelineResult r = fut.get();
    const BoundsReport& b = r.bounds;
    all = all && r.pass;
    csv << detail::format_double(r.epsilon) << "," << detail::format_double(b.max_pairwise_product)
        << "," << detail::format_double(b.max_distance_to_unit) << ","
        << detail::format_double(b.lambda_min) << "," << detail::format_double(b.bound_16) << ","
        << detail::format_double(b.bound_8) << "," << (b.pairwise_pass ? 1 : 0) << ","
        << (b.distance_pass ? 1 : 0) << "," << (r.pass ? 1 : 0) << "\n";
  }
  if (flags.out.empty()) {
    out << csv.str();
  } else {
    detail::write_file(flags.out, csv.str());
  }
  return all ? kPass : kVerificationFailed;
}

/// Queries: cuntz n | uhf q | torsion m | delta n | coprime m |
/// bezout k m | amplification n.
inline int cmd_pgen(const std::vector<std::string>& words, const Flags& flags, std::ostream& out) {
  if (words.empty()) throw parse_error("pgen: empty query");
  std::string query;
  for (const auto& w : words) query += (query.empty() ? "" : " ") + w;
  std::string kind = words.front();
  if (const auto paren = kind.find('('); paren != std::string::npos) kind = kind.substr(0, paren);

  json report;
  report["command"] = "pgen";
  report["query"] = query;
  auto natural_arg = [&](std::size_t count) {
    std::string s(query.substr(kind.size()));
    for (char& ch : s)
      if (ch == '(' || ch == ')' || ch == ',') ch = ' ';
    std::istringstream in(s);
    std::vector<std::uint64_t> args;
    for (std::string w; in >> w;) {
      const ExtNat v = ExtNat::parse(w);
      if (v.is_infinite()) throw parse_error("pgen: '" + kind + "' needs finite arguments");
      args.push_back(v.value());
    }
    if (args.size() != count) {
      throw parse_error("pgen: '" + kind + "' takes " + std::to_string(count) + " argument(s)");
    }
    return args;
  };

  if (kind == "cuntz" || kind == "uhf" || kind == "torsion") {
    const PgenReport r = pgen_bound_report(parse_family(query));
    report["family"] = r.family;
    report["value"] = r.exact ? json(r.exact->to_string()) : json("undetermined");
    report["lower"] = r.lower.to_string();
    report["upper"] = r.upper.to_string();
    report["formula"] = r.formula;
    report["notes"] = r.notes;
  } else if (kind == "delta") {
    const auto a = natural_arg(1);
    report["value"] = std::to_string(delta(a[0]));
    report["formula"] = "min{k : (k-1)(k-2) >= 2n}";
  } else if (kind == "coprime") {
    const auto a = natural_arg(1);
    report["value"] = std::to_string(min_coprime(a[0]));
    report["formula"] = "min{k >= 3 : gcd(k, m) = 1}";
  } else if (kind == "bezout") {
    const auto a = natural_arg(2);
    const BezoutPair b = bezout_natural(a[0], a[1]);
    report["value"] = std::to_string(b.c) + " " + std::to_string(b.d);
    report["c"] = b.c;
    report["d"] = b.d;
    report["formula"] = "k*c - m*d = 1 with c minimal";
  } else if (kind == "amplification") {
    const auto a = natural_arg(1);
    report["value"] = std::to_string(min_amplification(a[0]));
    report["formula"] = "min{l >= 1 : l^2 + 1 >= n}";
  } else {
    throw parse_error("pgen: unknown query '" + kind + "'");
  }

  Flags f = flags;
  if (f.report.empty()) f.report = "text";
  detail::emit(report, f, out);
  return kPass;
}

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Almost orthogonal projection generators for matrix algebras", "projgen"};
  app.require_subcommand(1);
  Flags flags;
  std::string input;
  std::vector<std::string> words;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--report", flags.report, "Report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--tol-proj", flags.tol_proj, "Projection residual tolerance");
    sub->add_option("--tol-rank", flags.tol_rank, "Closure rank tolerance");
  };
  auto add_pipeline = [&](CLI::App* sub) {
    sub->add_option("input", input, "Input JSON document ('-' for stdin)")->required();
    sub->add_option("--k", flags.k, "Amplification size k (>= delta(n))");
    sub->add_option("--epsilon", flags.epsilon, "Epsilon in (0, 1/(8(k-1)))");
    add_common(sub);
  };

  CLI::App* construct = app.add_subcommand("construct", "Build and certify the projection family");
  add_pipeline(construct);
  construct->add_option("--out", flags.out, "Write projections to FILE");
  construct->add_flag("--timing", flags.timing, "Include wall time in the report");

  CLI::App* verify = app.add_subcommand("verify", "Re-verify a projection file");
  add_pipeline(verify);
  verify->add_flag("--timing", flags.timing, "Include wall time in the report");

  CLI::App* closure = app.add_subcommand("closure", "Dimension of the generated *-algebra");
  closure->add_option("input", input, "Input JSON document ('-' for stdin)")->required();
  closure->add_option("--max-dim", flags.max_dim, "Closure dimension cap");
  add_common(closure);

  CLI::App* sweep = app.add_subcommand("sweep", "Tabulate measured bounds over an epsilon grid");
  add_pipeline(sweep);
  sweep->add_option("--grid", flags.grid, "a:b:n or comma-separated epsilons");
  sweep->add_option("--out", flags.out, "Write CSV to FILE");

  CLI::App* pgen = app.add_subcommand("pgen", "Generator-count arithmetic");
  pgen->add_option("query", words, "cuntz n | uhf q | torsion m | delta n | coprime m | bezout k m | amplification n")
      ->required();
  pgen->add_option("--report", flags.report, "Report format")->check(CLI::IsMember({"json", "text"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
  if (flags.report.empty() && !pgen->parsed()) flags.report = "json";

  try {
    if (construct->parsed()) return cmd_construct(input, flags, out);
    if (verify->parsed()) return cmd_verify(input, flags, out);
    if (closure->parsed()) return cmd_closure(input, flags, out);
    if (sweep->parsed()) return cmd_sweep(input, flags, out);
    return cmd_pgen(words, flags, out);
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const precondition_error& e) {
    err << "precondition error: " << e.what() << "\n";
    return kPreconditionError;
  } catch (const numerical_error& e) {
    err << "verification failed: " << e.what() << "\n";
    return kVerificationFailed;
  }
}

}  // namespace projgen::cli
