#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "boxtopos/dot.hpp"
#include "boxtopos/json_io.hpp"

namespace boxtopos::cli {

// What a single invocation produces. Byte-deterministic for fixed inputs:
// JSON objects keep sorted keys and rationals render canonically.
struct CommandResult {
  std::string status = "ok";  // "ok" | "error"
  Json payload;
  std::vector<std::string> diagnostics;
  std::string text;  // DOT or help output
  bool is_text = false;
  std::string error_kind;  // "input" | "resource" | "usage"
  int exit_code = 0;       // 0 ok, 1 input/validation, 2 resource cap
};

namespace detail {

inline Json load_json(const std::string& path) {
  if (path.empty()) throw InputError("no --input given");
  std::string text;
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError("cannot parse JSON from '" + path + "': " + e.what());
  }
}

inline BoxPresentation preset_presentation(const std::string& name) {
  if (name == "gbit") return BoxPresentation::gbit();
  if (name == "pr") return BoxPresentation::pr();
  throw InputError("unknown preset '" + name + "' (available: gbit, pr)");
}

struct Opts {
  std::string input;
  std::string preset;
  std::string format = "json";
  bool approx = false;
  std::size_t cap = 0;
  std::uint64_t seed = 0;
  std::string context;
  std::string outcome;
  std::string at;
  std::string assignment;
  std::string functional;
  std::string left;
  std::string right;
  std::string what = "contexts";

  Config config() const {
    Config cfg;
    if (cap) {
      cfg.elements_cap = cap;
      cfg.polytope_dim_cap = cap;
    }
    if (seed) cfg.seed = seed;
    return cfg;
  }

  BoxPresentation presentation() const {
    if (!preset.empty()) return preset_presentation(preset);
    return box_from_json(load_json(input));
  }

  LogicDiagram diagram() const {
    if (!preset.empty())
      return LogicDiagram::from_box(preset_presentation(preset));
    return diagram_from_json(load_json(input));
  }

  BoxState state() const { return state_from_json(load_json(input)); }

  // a presentation preset name or a file path
  BoxPresentation side(const std::string& value) const {
    if (value == "gbit" || value == "pr") return preset_presentation(value);
    return box_from_json(load_json(value));
  }

  Render render() const { return Render{approx}; }

  void require_json_format() const {
    if (format != "json")
      throw InputError("this subcommand only supports --format json");
  }
};

inline Json context_list_json(const LogicDiagram& d,
                              const std::vector<std::string>& ids) {
  Json out = Json::array();
  for (const auto& id : ids) {
    if (d.origin_box())
      out.push_back(context_questions(id));
    else
      out.push_back(id);
  }
  return out;
}

inline Json section_json(const LogicDiagram& d, const CompatibleSection& s) {
  Json j = Json::object();
  for (const auto& [cid, mask] : s.values)
    j[cid] = d.algebra(cid).element_atoms(mask);
  return j;
}

inline Json validation_json(const ValidationReport& report) {
  return Json{{"valid", report.ok}, {"diagnostics", report.diagnostics}};
}

inline Json colimit_classes_json(const LogicDiagram& d,
                                 const ColimitPresentation& col) {
  std::vector<Json> members(col.n_classes, Json::array());
  const auto& ctx = d.contexts();
  for (std::size_t ci = 0; ci < ctx.size(); ++ci)
    for (std::uint64_t u = 0; u < col.class_of[ci].size(); ++u)
      members[col.inject(ci, u)].push_back(
          Json::array({ctx.id_of(ci), d.algebra(ci).element_atoms(u)}));
  Json classes = Json::array();
  for (std::size_t k = 0; k < col.n_classes; ++k)
    classes.push_back({{"id", k}, {"members", members[k]}});
  return classes;
}

inline CommandResult dispatch(const std::string& command, const Opts& opts) {
  const Config cfg = opts.config();
  const Render render = opts.render();
  CommandResult res;

  if (command == "contexts") {
    auto d = opts.diagram();
    if (opts.format == "dot") {
      res.text = poset_dot(d.contexts(), "contexts");
      res.is_text = true;
      return res;
    }
    res.payload["count"] = d.contexts().size();
    res.payload["contexts"] = context_list_json(d, d.contexts().elements());
    res.payload["maximal"] =
        context_list_json(d, maximal_contexts(d.contexts()));
    return res;
  }

  if (command == "phase-space") {
    auto d = opts.diagram();
    auto ps = phase_space(d);
    if (opts.format == "dot") {
      res.text = phase_space_dot(ps);
      res.is_text = true;
      return res;
    }
    res.payload = phase_space_to_json(ps);
    res.payload["count"] = ps.points.size();
    return res;
  }

  if (command == "frame") {
    opts.require_json_format();
    auto d = opts.diagram();
    auto ps = phase_space(d);
    auto frame = external_frame(ps, cfg);
    res.payload["count"] = frame.opens.size();
    Json opens = Json::array();
    for (const auto& open : frame.opens)
      opens.push_back(UpperSet{ps.points, open}.member_ids());
    res.payload["opens"] = opens;
    return res;
  }

  if (command == "sections") {
    opts.require_json_format();
    auto d = opts.diagram();
    auto sections = sections_at(d, opts.at, cfg);
    res.payload["base"] = opts.at;
    res.payload["count"] = sections.size();
    Json list = Json::array();
    for (const auto& s : sections) list.push_back(section_json(d, s));
    res.payload["sections"] = list;
    return res;
  }

  if (command == "colimit") {
    opts.require_json_format();
    auto d = opts.diagram();
    auto col = colimit(d, cfg);
    res.payload["count"] = col.n_classes;
    res.payload["classes"] = colimit_classes_json(d, col);
    return res;
  }

  if (command == "validate-state") {
    opts.require_json_format();
    res.payload = validation_json(validate_state(opts.state()));
    return res;
  }

  if (command == "marginal") {
    opts.require_json_format();
    res.payload = render.rat(marginal(opts.state(), opts.context, opts.outcome));
    return res;
  }

  if (command == "chsh") {
    opts.require_json_format();
    res.payload = render.rat(chsh(opts.state()));
    return res;
  }

  if (command == "bell") {
    opts.require_json_format();
    auto f = functional_from_json(load_json(opts.functional));
    res.payload = render.rat(bell_value(opts.state(), f));
    return res;
  }

  if (command == "vertices") {
    opts.require_json_format();
    auto b = opts.presentation();
    auto vertices = ns_polytope_vertices(b, cfg);
    res.payload["presentation"] = box_to_json(b);
    res.payload["count"] = vertices.size();
    Json list = Json::array();
    for (const auto& v : vertices)
      list.push_back(table_to_json(v.maximal, v.table, render));
    res.payload["vertices"] = list;
    return res;
  }

  if (command == "is-classical") {
    opts.require_json_format();
    auto result = is_classical(opts.state(), cfg);
    res.payload["classical"] = result.classical;
    if (result.classical) {
      Json weights = Json::array();
      for (const auto& w : result.weights)
        weights.push_back(
            {{"assignment", w.assignment}, {"weight", render.rat(w.weight)}});
      res.payload["weights"] = weights;
    } else {
      res.payload["separating"] = functional_to_json(*result.separating, render);
      res.payload["classical_bound"] = render.rat(result.classical_bound);
      res.payload["value"] = render.rat(result.value);
    }
    return res;
  }

  if (command == "pr-box") {
    opts.require_json_format();
    res.payload = state_to_json(pr_box(), render);
    return res;
  }

  if (command == "deterministic") {
    opts.require_json_format();
    Json g;
    try {
      g = Json::parse(opts.assignment);
    } catch (const Json::exception&) {
      throw InputError("--assignment must be a JSON object like {\"q1\":0}");
    }
    GlobalAssignment assignment;
    for (const auto& [q, v] : g.items())
      assignment[q] = v.get<int>();
    res.payload =
        state_to_json(deterministic_state(opts.presentation(), assignment),
                      render);
    return res;
  }

  if (command == "uniform") {
    opts.require_json_format();
    res.payload = state_to_json(uniform_state(opts.presentation()), render);
    return res;
  }

  if (command == "mix") {
    opts.require_json_format();
    Json j = load_json(opts.input);
    if (!j.contains("states") || !j.contains("weights"))
      throw InputError("mix input needs \"states\" and \"weights\"");
    std::vector<BoxState> states;
    for (const auto& s : j.at("states")) states.push_back(state_from_json(s));
    std::vector<Rational> weights;
    for (const auto& w : j.at("weights"))
      weights.push_back(rational_from_json(w));
    res.payload = state_to_json(mix(states, weights), render);
    return res;
  }

  if (command == "state-to-valuation") {
    opts.require_json_format();
    res.payload = valuation_to_json(state_to_valuation(opts.state(), cfg), render);
    return res;
  }

  if (command == "valuation-to-state") {
    opts.require_json_format();
    auto v = valuation_from_json(load_json(opts.input), cfg);
    res.payload = state_to_json(valuation_to_state(v, cfg), render);
    return res;
  }

  if (command == "validate-valuation") {
    opts.require_json_format();
    auto v = valuation_from_json(load_json(opts.input), cfg);
    res.payload = validation_json(validate_valuation(v, cfg));
    return res;
  }

  if (command == "roundtrip") {
    opts.require_json_format();
    auto s = opts.state();
    auto v = state_to_valuation(s, cfg);
    auto back = valuation_to_state(v, cfg);
    res.payload["state"] = state_to_json(back, render);
    res.payload["roundtrip_exact"] = (back == s);
    res.payload["valuation_valid"] = validate_valuation(v, cfg).ok;
    return res;
  }

  if (command == "colimit-valuation") {
    opts.require_json_format();
    Json j = load_json(opts.input);
    InternalValuation v = j.contains("rows")
                              ? valuation_from_json(j, cfg)
                              : state_to_valuation(state_from_json(j), cfg);
    auto cv = valuation_to_colimit(v, cfg);
    res.payload["count"] = cv.colim.n_classes;
    Json rho = Json::array();
    for (const auto& r : cv.rho) rho.push_back(render.rat(r));
    res.payload["rho"] = rho;
    res.payload["classes"] = colimit_classes_json(v.diagram, cv.colim);
    return res;
  }

  if (command == "map") {
    opts.require_json_format();
    auto m = morphism_from_json(load_json(opts.input));
    auto report = validate_box_morphism(m);
    res.payload["valid"] = report.ok;
    res.payload["diagnostics"] = report.diagnostics;
    if (report.ok) {
      auto phi = induced_context_map(m);
      Json cmap = Json::object();
      for (std::size_t i = 0; i < phi.source().size(); ++i)
        cmap[phi.source().id_of(i)] = phi.target().id_of(phi.apply_index(i));
      res.payload["context_map"] = cmap;
      auto f = phase_space_map(m);
      Json pmap = Json::object();
      for (std::size_t i = 0; i < f.source().size(); ++i)
        pmap[f.source().id_of(i)] = f.target().id_of(f.apply_index(i));
      res.payload["phase_space_map"] = pmap;
    }
    return res;
  }

  if (command == "product-check") {
    opts.require_json_format();
    res.payload["product"] =
        check_product_phase_space(opts.side(opts.left), opts.side(opts.right));
    return res;
  }

  if (command == "export") {
    Json j = load_json(opts.input);
    FinitePoset poset;
    std::string name = "poset";
    if (j.contains("elements")) {
      poset = poset_from_json(j);
    } else if (j.contains("table")) {
      poset = contexts_of(box_from_json(j.at("presentation")));
      name = "contexts";
    } else {
      auto d = diagram_from_json(j);
      if (opts.what == "phase-space") {
        auto ps = phase_space(d);
        if (opts.format == "dot") {
          res.text = phase_space_dot(ps);
          res.is_text = true;
        } else {
          res.payload = phase_space_to_json(ps);
        }
        return res;
      }
      poset = d.contexts();
      name = "contexts";
    }
    if (opts.format == "dot") {
      res.text = poset_dot(poset, name);
      res.is_text = true;
    } else {
      res.payload = poset_to_json(poset);
    }
    return res;
  }

  throw InputError("unknown subcommand '" + command + "'");
}

}  // namespace detail

inline CommandResult run(std::vector<std::string> args) {
  CLI::App app{"Exact finite models of non-signalling box worlds: context "
               "posets, measurement logics, phase spaces, exact polytopes "
               "and the state-valuation correspondence"};
  app.require_subcommand(1);
  detail::Opts opts;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"contexts", "Context poset of a presentation or theory"},
      {"phase-space", "External phase space of a presentation or theory"},
      {"frame", "All opens of the external phase space"},
      {"sections", "Sections of the internal ideal completion at a stage"},
      {"colimit", "Colimit classes of the logic diagram"},
      {"validate-state", "Check normalization and non-signalling"},
      {"marginal", "Common marginal of an outcome on a context"},
      {"chsh", "CHSH value of a two-party two-question state"},
      {"bell", "Value of a Bell functional on a state"},
      {"vertices", "Vertices of the non-signalling polytope"},
      {"is-classical", "Deterministic-mixture test with certificate"},
      {"pr-box", "The box state attaining CHSH value 4"},
      {"deterministic", "Point mass for a global assignment"},
      {"uniform", "Uniform state of a presentation"},
      {"mix", "Convex combination of states"},
      {"state-to-valuation", "Internal valuation induced by a state"},
      {"valuation-to-state", "State read back from a valuation"},
      {"validate-valuation", "Check the four valuation clauses"},
      {"roundtrip", "State-valuation-state round trip, exactness reported"},
      {"colimit-valuation", "Descend a valuation to the colimit"},
      {"map", "Induced context and phase-space maps of a box morphism"},
      {"product-check", "Phase space of a coproduct vs product of spaces"},
      {"export", "DOT/JSON export of posets and phase spaces"},
  };

  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--input,-i,--state", opts.input,
                    "Input file, or '-' for stdin");
    sub->add_option("--preset", opts.preset, "Built-in presentation: gbit, pr");
    sub->add_option("--format", opts.format, "Output format: json or dot")
        ->check(CLI::IsMember({"json", "dot"}));
    sub->add_flag("--approx", opts.approx,
                  "Render rationals as 12-digit decimals");
    sub->add_option("--cap", opts.cap, "Enumeration cap override")
        ->envname("BOXTOPOS_CAP");
    sub->add_option("--seed", opts.seed, "Seed for sampled checks");
    if (name == "marginal") {
      sub->add_option("--context", opts.context, "Context id, e.g. a1,b1")
          ->required();
      sub->add_option("--outcome", opts.outcome, "Outcome word, e.g. 01")
          ->required();
    }
    if (name == "sections")
      sub->add_option("--at", opts.at, "Stage context id (default: bottom)");
    if (name == "deterministic")
      sub->add_option("--assignment", opts.assignment,
                      "Global assignment JSON, e.g. {\"q1\":0,\"q2\":1}")
          ->required();
    if (name == "bell")
      sub->add_option("--functional", opts.functional,
                      "Bell functional file, or '-'")
          ->required();
    if (name == "product-check") {
      sub->add_option("--left", opts.left, "Preset name or presentation file")
          ->required();
      sub->add_option("--right", opts.right, "Preset name or presentation file")
          ->required();
    }
    if (name == "export")
      sub->add_option("--what", opts.what,
                      "For presentations/theories: contexts or phase-space")
          ->check(CLI::IsMember({"contexts", "phase-space"}));
  }

  CommandResult res;
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
    const std::string command = app.get_subcommands().front()->get_name();
    return detail::dispatch(command, opts);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream help;
    help << app.help();
    res.text = help.str();
    res.is_text = true;
    return res;
  } catch (const CLI::ParseError& e) {
    res.status = "error";
    res.error_kind = "usage";
    res.diagnostics.push_back(e.what());
    res.exit_code = 1;
    return res;
  } catch (const ResourceError& e) {
    res.status = "error";
    res.error_kind = "resource";
    res.diagnostics.push_back(e.what());
    res.exit_code = 2;
    return res;
  } catch (const InputError& e) {
    res.status = "error";
    res.error_kind = "input";
    res.diagnostics.push_back(e.what());
    res.exit_code = 1;
    return res;
  } catch (const Json::exception& e) {
    res.status = "error";
    res.error_kind = "input";
    res.diagnostics.push_back(e.what());
    res.exit_code = 1;
    return res;
  }
}

}  // namespace boxtopos::cli
