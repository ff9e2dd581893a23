// lpx: parse, ground, solve and transform logic programs over finite
// structures, and run the clause-code simulation over the naturals.

#include <lpx/infinite.hpp>
#include <lpx/sm_formula.hpp>
#include <lpx/stable.hpp>
#include <lpx/transforms.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lpx;
using Json = nlohmann::ordered_json;

namespace {

// Exit statuses.
constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Options {
  bool json = false;
  std::string program, program_b, structure, base, out, manifest, formula, fin, inf, kind, pred = "p";
  std::size_t domain_size = 0, max_domain = 2, stages = 4, depth = kDefaultTraceDepth, k = 1;
  std::vector<std::string> aux, aux_b, tau, sigma, xs, exists;
  bool dump_codes = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

Program load_program(const std::string& path) {
  try {
    return parse_program(read_file(path));
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

EnumerationOptions enumeration_options() {
  EnumerationOptions opt;
  if (const char* cap = std::getenv("LPX_ENUM_CAP")) {
    try {
      std::size_t used = 0;
      opt.cap = std::stoull(cap, &used);
      if (used != std::string(cap).size() || opt.cap == 0) throw std::invalid_argument(cap);
    } catch (const std::exception&) {
      throw Error(std::string("LPX_ENUM_CAP must be a positive integer, got '") + cap + "'");
    }
  }
  return opt;
}

Structure base_structure(const Options& o) {
  if (!o.structure.empty() && o.domain_size) throw Error("give either --structure or --domain-size, not both");
  if (!o.structure.empty()) return load_structure(read_file(o.structure));
  if (o.domain_size) return Structure::of_size(o.domain_size);
  throw Error("a structure is required: use --structure FILE or --domain-size N");
}

// Adds every predicate of p the structure lacks as an empty relation.
Structure complete_with_empty(Structure s, const Program& p) {
  for (const auto& sym : p.vocabulary().symbols()) {
    if (s.interprets(sym.name)) continue;
    if (sym.kind == SymbolKind::kFunction) throw Error("structure does not interpret function '" + sym.name + "'");
    s.add_predicate(sym.name, sym.arity);
  }
  return s;
}

// Names, optionally with "/arity", resolved against a vocabulary.
std::vector<Symbol> resolve_symbols(const std::vector<std::string>& specs, const Vocabulary& v, const std::string& what) {
  std::vector<Symbol> out;
  for (const auto& spec : specs) {
    auto slash = spec.find('/');
    std::string name = spec.substr(0, slash);
    const SymbolInfo* info = v.find(name);
    if (slash != std::string::npos) {
      std::size_t arity = std::stoul(spec.substr(slash + 1));
      if (info && info->arity != arity) throw Error(what + " symbol " + name + " is used with arity " + std::to_string(info->arity));
      out.push_back({name, info ? info->kind : SymbolKind::kPredicate, arity});
    } else {
      if (!info) throw Error(what + " symbol " + name + " does not occur; give it as " + name + "/ARITY");
      out.push_back({name, info->kind, info->arity});
    }
  }
  return out;
}

std::string clause_text(const PositiveClause& c, const Structure& s) {
  std::vector<std::string> atoms;
  for (const auto& a : c) atoms.push_back(render(a, s));
  std::sort(atoms.begin(), atoms.end());
  if (atoms.empty()) return "#false";
  std::string out;
  for (const auto& a : atoms) out += (out.empty() ? "" : " | ") + a;
  return out;
}

Json classification_json(const Program& p) {
  auto c = classify(p);
  Json j;
  j["normal"] = c.normal;
  j["plain"] = c.plain;
  j["propositional"] = c.propositional;
  j["head_cycle_free"] = head_cycle_free(p);
  j["intensional"] = c.intensional;
  return j;
}

Json report(const std::string& command) {
  Json j;
  j["schema"] = 1;
  j["command"] = command;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int run_parse(const Options& o) {
  Program p = load_program(o.program);
  if (o.json) {
    Json j = report("parse");
    j["program"] = render_program(p);
    j["rules"] = p.size();
    j["classification"] = classification_json(p);
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  auto c = classify(p);
  std::cout << render_program(p);
  std::cout << "% rules: " << p.size() << "\n";
  std::cout << "% normal: " << (c.normal ? "yes" : "no") << "\n";
  std::cout << "% plain: " << (c.plain ? "yes" : "no") << "\n";
  std::cout << "% propositional: " << (c.propositional ? "yes" : "no") << "\n";
  std::cout << "% head-cycle-free: " << (head_cycle_free(p) ? "yes" : "no") << "\n";
  std::cout << "% intensional:";
  for (const auto& n : c.intensional) std::cout << " " << n;
  std::cout << "\n";
  return kOk;
}

int run_ground(const Options& o) {
  Program p = load_program(o.program);
  Structure s = complete_with_empty(base_structure(o), p);
  auto g = gl_reduct(p, s);
  std::vector<std::string> lines;
  for (const auto& r : g) lines.push_back(render(r, s));
  if (o.json) {
    Json j = report("ground");
    j["rules"] = lines;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& l : lines) std::cout << l << "\n";
  }
  return kOk;
}

int run_solve(const Options& o) {
  Program p = load_program(o.program);
  Structure base = base_structure(o);
  std::vector<Symbol> aux = o.aux.empty() ? missing_symbols(base, p) : resolve_symbols(o.aux, p.vocabulary(), "auxiliary");
  auto found = enumerate_stable_expansions(base, p, aux, enumeration_options());
  if (o.json) {
    Json j = report("solve");
    j["count"] = found.size();
    j["expansions"] = Json::array();
    for (const auto& s : found) j["expansions"].push_back(Json::parse(save_structure(s)));
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::cout << "% " << found.size() << " stable expansion" << (found.size() == 1 ? "" : "s") << "\n";
  for (std::size_t i = 0; i < found.size(); ++i) {
    std::cout << "% expansion " << i + 1 << "\n" << save_structure(found[i]) << "\n";
  }
  return kOk;
}

int run_progress(const Options& o) {
  Program p = load_program(o.program);
  Structure s = complete_with_empty(base_structure(o), p);
  GammaTrace t = gamma_omega(s, p, o.depth);
  auto lines = [&](const ClauseSet& cs) {
    std::vector<std::string> out;
    for (const auto& c : cs) out.push_back(clause_text(c, s));
    std::sort(out.begin(), out.end());
    return out;
  };
  if (o.json) {
    Json j = report("progress");
    j["fixpoint_stage"] = t.stage_count;
    j["stages"] = Json::array();
    for (const auto& st : t.stages) j["stages"].push_back(lines(st));
    j["fixpoint"] = lines(t.fixpoint);
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  for (std::size_t n = 0; n < t.stages.size(); ++n) {
    std::cout << "stage " << n << ":\n";
    for (const auto& l : lines(t.stages[n])) std::cout << "  " << l << "\n";
  }
  std::cout << "fixpoint reached at stage " << t.stage_count << "\n";
  if (t.stages.size() <= t.stage_count) {
    std::cout << "fixpoint:\n";
    for (const auto& l : lines(t.fixpoint)) std::cout << "  " << l << "\n";
  }
  return kOk;
}

void emit_output(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
}

int run_transform(const Options& o) {
  const std::string& kind = o.kind;
  auto need = [&](const std::string& value, const char* flag) {
    if (value.empty()) throw Error("transform " + kind + " needs " + flag);
  };
  if (kind == "nlp2theory") {
    need(o.program, "--program");
    UniversalTheory t = nlp_to_universal_theory(load_program(o.program), o.k);
    Json m = report("transform");
    m["kind"] = "nlp2theory";
    m["symbols"] = Json::array();
    for (const auto& s : t.manifest) {
      m["symbols"].push_back({{"name", s.name}, {"arity", s.arity}, {"kind", to_string(s.kind)}, {"role", s.role}});
    }
    m["order_width"] = t.order_width;
    if (!o.manifest.empty()) write_file(o.manifest, m.dump(2) + "\n");
    if (o.json) {
      m["theory"] = render(t);
      std::cout << m.dump(2) << "\n";
    } else {
      emit_output(o, render(t) + "\n");
    }
    return kOk;
  }

  TransformReport rep;
  if (kind == "shift") {
    need(o.program, "--program");
    rep = shift(load_program(o.program));
  } else if (kind == "dlp2nlp") {
    need(o.program, "--program");
    rep = dlp_to_nlp_infinite(load_program(o.program));
  } else if (kind == "theory2lp") {
    if (!o.program.empty()) {
      rep = universal_theory_to_constraints(nlp_to_universal_theory(load_program(o.program), o.k));
    } else {
      need(o.formula, "--formula or --program");
      UniversalTheory t;
      t.matrix = parse_formula(read_file(o.formula));
      for (const auto& s : resolve_symbols(o.exists, formula_symbols(t.matrix), "existential")) {
        t.prefix.push_back({s.name, s.kind, s.arity});
      }
      rep = universal_theory_to_constraints(t);
    }
  } else if (kind == "so2dlp") {
    need(o.formula, "--formula");
    Formula matrix = parse_formula(read_file(o.formula));
    Vocabulary v = formula_symbols(matrix);
    rep = so2dlp(matrix, resolve_symbols(o.tau, v, "tau"), resolve_symbols(o.sigma, v, "sigma"), o.xs);
  } else if (kind == "parity") {
    rep = parity_program(o.k, o.pred);
  } else if (kind == "combine") {
    need(o.fin, "--fin");
    need(o.inf, "--inf");
    rep = combine_fin_inf(load_program(o.fin), load_program(o.inf));
  } else {
    throw Error("unknown transform kind '" + kind + "'");
  }
  Json m = manifest_json(rep);
  if (!o.manifest.empty()) write_file(o.manifest, m.dump(2) + "\n");
  if (o.json) {
    Json j = report("transform");
    j["kind"] = rep.kind;
    j["program"] = render_program(rep.program);
    j["manifest"] = m;
    std::cout << j.dump(2) << "\n";
  } else {
    emit_output(o, render_program(rep.program));
  }
  return kOk;
}

int run_check_equiv(const Options& o) {
  Program a = load_program(o.program), b = load_program(o.program_b);
  auto aux_a = resolve_symbols(o.aux, a.vocabulary(), "auxiliary");
  auto aux_b = resolve_symbols(o.aux_b, b.vocabulary(), "auxiliary");
  auto visible = [](const Program& p, const std::vector<Symbol>& aux) {
    Vocabulary v;
    for (const auto& s : p.vocabulary().symbols()) {
      if (std::none_of(aux.begin(), aux.end(), [&](const Symbol& x) { return x.name == s.name; })) v.add(s);
    }
    return v;
  };
  Vocabulary va = visible(a, aux_a), vb = visible(b, aux_b), shared;
  for (const auto& s : va.symbols()) {
    if (const SymbolInfo* other = vb.find(s.name); other && other->arity == s.arity && other->kind == s.kind) shared.add(s);
  }
  auto opt = enumeration_options();
  auto restricted = [&](const Program& p, const Structure& base) {
    std::set<std::string> out;
    for_each_stable_expansion(
        base, p, missing_symbols(base, p), [&](const Structure& s) { out.insert(save_structure(s.restrict(shared))); }, opt);
    return out;
  };
  Json j = report("check-equiv");
  j["shared"] = Json::array();
  for (const auto& s : shared.symbols()) j["shared"].push_back(s.name + "/" + std::to_string(s.arity));
  j["sizes"] = Json::array();
  bool equal = true;
  std::string witness, side;
  std::size_t at = 0;
  for (std::size_t n = 1; n <= o.max_domain && equal; ++n) {
    Structure base = Structure::of_size(n);
    auto sa = restricted(a, base), sb = restricted(b, base);
    j["sizes"].push_back({{"size", n}, {"first", sa.size()}, {"second", sb.size()}});
    for (const auto& [mine, theirs, name] : {std::tuple{&sa, &sb, "first"}, std::tuple{&sb, &sa, "second"}}) {
      for (const auto& s : *mine) {
        if (!theirs->count(s)) {
          equal = false;
          witness = s;
          side = name;
          at = n;
          break;
        }
      }
      if (!equal) break;
    }
  }
  j["equivalent"] = equal;
  if (!equal) {
    j["witness"] = {{"size", at}, {"only_in", side}, {"structure", Json::parse(witness)}};
  }
  if (o.json) {
    std::cout << j.dump(2) << "\n";
  } else if (equal) {
    std::cout << "equivalent on the shared vocabulary over domains of size 1.." << o.max_domain << "\n";
  } else {
    std::cout << "NOT equivalent at domain size " << at << "; only the " << side << " program has:\n" << witness << "\n";
  }
  if (!equal) std::cerr << "check-equiv: stable expansion sets differ\n";
  return equal ? kOk : kFailed;
}

int run_claim1(const Options& o) {
  Program p = load_program(o.program);
  NatBase base = o.base.empty() ? NatBase{} : base_from_facts(load_program(o.base));
  CodeRegistry reg = CodeRegistry::for_program(p);
  SimulationReport rep = claim1_check(p, base, o.stages, reg);
  Encodings enc(reg);
  if (o.json) {
    Json j = report("claim1");
    j["pass"] = rep.pass;
    j["offset"] = rep.offset;
    j["gamma_converged"] = rep.gamma_converged;
    j["delta_converged"] = rep.delta_converged;
    j["flags"] = Json::object();
    for (const auto& [pred, f] : reg.atom_flags()) j["flags"][pred] = f.str();
    j["flags"]["clauses"] = reg.clause_flag().str();
    j["stages"] = Json::array();
    for (const auto& st : rep.stages) {
      j["stages"].push_back({{"stage", st.stage},
                             {"gamma_clauses", st.gamma_clauses},
                             {"delta_codes", st.delta_codes},
                             {"delta_classes", st.delta_classes},
                             {"missing_from_delta", st.missing_from_delta},
                             {"extra_in_delta", st.extra_in_delta}});
    }
    if (o.dump_codes) {
      j["codes"] = Json::array();
      for (const auto& [code, e] : reg.entries()) {
        j["codes"].push_back({{"code", code.str()}, {"left", e.left.str()}, {"right", e.right.str()}, {"encodes", enc.describe(code)}});
      }
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "flags:";
    for (const auto& [pred, f] : reg.atom_flags()) std::cout << " " << pred << "=" << f.str();
    std::cout << " clauses=" << reg.clause_flag().str() << "\n";
    if (rep.offset) std::cout << "values shifted by " << rep.offset << "\n";
    for (const auto& st : rep.stages) {
      std::cout << "stage " << st.stage << ": " << st.gamma_clauses << " clauses, " << st.delta_codes << " codes in "
                << st.delta_classes << " classes\n";
      for (const auto& m : st.missing_from_delta) std::cout << "  missing from codes: " << m << "\n";
      for (const auto& m : st.extra_in_delta) std::cout << "  extra code: " << m << "\n";
    }
    if (!rep.gamma_converged) std::cout << "note: the clause stages were still growing at stage " << o.stages << "\n";
    if (o.dump_codes) {
      std::cout << "codes:\n";
      for (const auto& [code, e] : reg.entries()) {
        std::cout << "  " << code.str();
        if (code.is_exact()) std::cout << " = e(" << e.left.str() << "," << e.right.str() << ")";
        std::cout << "  " << enc.describe(code) << "\n";
      }
    }
    std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
  }
  if (!rep.pass) std::cerr << "claim1: clause stages and code stages differ\n";
  return rep.pass ? kOk : kFailed;
}

int run_sm_formula(const Options& o) {
  Program p = load_program(o.program);
  std::string text = render(sm_formula(p));
  if (o.json) {
    Json j = report("sm-formula");
    j["formula"] = text;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic programs over finite structures, program transformations and clause-code simulation"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "Print a machine-readable report");
  app.fallthrough();

  auto* parse = app.add_subcommand("parse", "Validate, pretty-print and classify a program");
  parse->add_option("program,--program", o.program, "Program file")->required();

  auto structure_options = [&](CLI::App* sub) {
    sub->add_option("--structure", o.structure, "Structure file (JSON)");
    sub->add_option("--domain-size", o.domain_size, "Use the bare domain {0..N-1}")->check(CLI::PositiveNumber);
  };

  auto* ground = app.add_subcommand("ground", "Print the ground reduct over a structure (missing predicates are empty)");
  ground->add_option("program,--program", o.program, "Program file")->required();
  structure_options(ground);

  auto* solve = app.add_subcommand("solve", "Enumerate the stable expansions of a structure");
  solve->add_option("program,--program", o.program, "Program file")->required();
  structure_options(solve);
  solve->add_option("--aux", o.aux, "Symbols to guess (default: all the structure lacks)")->delimiter(',');

  auto* progress = app.add_subcommand("progress", "Trace the progression stages (missing predicates are empty)");
  progress->add_option("program,--program", o.program, "Program file")->required();
  structure_options(progress);
  progress->add_option("--depth", o.depth, "Number of stages to print")->capture_default_str();

  auto* transform = app.add_subcommand("transform", "Apply a program transformation");
  transform->add_option("--kind", o.kind, "Transformation")
      ->required()
      ->check(CLI::IsMember({"shift", "dlp2nlp", "nlp2theory", "theory2lp", "so2dlp", "parity", "combine"}));
  transform->add_option("program,--program", o.program, "Input program");
  transform->add_option("--out", o.out, "Output file (default: standard output)");
  transform->add_option("--manifest", o.manifest, "Write fresh symbols and rule counts as JSON");
  transform->add_option("--k", o.k, "Arity bound (nlp2theory, theory2lp) or tuple width (parity)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  transform->add_option("--pred", o.pred, "Input predicate of the parity program")->capture_default_str();
  transform->add_option("--formula", o.formula, "Formula file (theory2lp, so2dlp)");
  transform->add_option("--exists", o.exists, "Existential symbols of the theory (name or name/arity)")->delimiter(',');
  transform->add_option("--tau", o.tau, "Existential predicates (name or name/arity)")->delimiter(',');
  transform->add_option("--sigma", o.sigma, "Universal predicates (name or name/arity)")->delimiter(',');
  transform->add_option("--xs", o.xs, "Universally quantified variables")->delimiter(',');
  transform->add_option("--fin", o.fin, "Program for finite structures (combine)");
  transform->add_option("--inf", o.inf, "Program for infinite structures (combine)");

  auto* equiv = app.add_subcommand("check-equiv", "Compare stable expansions on the shared vocabulary");
  equiv->add_option("first", o.program, "First program")->required();
  equiv->add_option("second", o.program_b, "Second program")->required();
  equiv->add_option("--max-domain", o.max_domain, "Largest domain size")->check(CLI::PositiveNumber)->capture_default_str();
  equiv->add_option("--aux-a", o.aux, "Existentially quantified symbols of the first program")->delimiter(',');
  equiv->add_option("--aux-b", o.aux_b, "Existentially quantified symbols of the second program")->delimiter(',');

  auto* claim1 = app.add_subcommand("claim1", "Compare progression stages with their simulation on clause codes");
  claim1->add_option("program,--program", o.program, "Range-restricted program over numerals")->required();
  claim1->add_option("--stages", o.stages, "Number of stages")->capture_default_str();
  claim1->add_option("--base", o.base, "Ground facts interpreting the program's predicates");
  claim1->add_flag("--dump-codes", o.dump_codes, "Print every constructed code with its operands");

  auto* smf = app.add_subcommand("sm-formula", "Print the stable model operator SM applied to a program");
  smf->add_option("program,--program", o.program, "Program file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) return run_parse(o);
    if (*ground) return run_ground(o);
    if (*solve) return run_solve(o);
    if (*progress) return run_progress(o);
    if (*transform) return run_transform(o);
    if (*equiv) return run_check_equiv(o);
    if (*claim1) return run_claim1(o);
    if (*smf) return run_sm_formula(o);
  } catch (const Error& e) {
    std::cerr << "lpx: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "lpx: internal error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
