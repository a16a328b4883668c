#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "boxtopos/cli.hpp"

using namespace boxtopos;
namespace cli = boxtopos::cli;

namespace {

std::string write_temp(const std::string& name, const Json& j) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << j.dump();
  return path.string();
}

cli::CommandResult ok(std::vector<std::string> args) {
  auto res = cli::run(std::move(args));
  INFO((res.diagnostics.empty() ? "" : res.diagnostics.front()));
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.status == "ok");
  return res;
}

}  // namespace

TEST_CASE("contexts subcommand matches the library") {
  auto res = ok({"contexts", "--preset", "pr"});
  CHECK(res.payload["count"] == 9);

  auto ctx = contexts_of(BoxPresentation::pr());
  Json expected = Json::array();
  for (const auto& id : ctx.elements())
    expected.push_back(context_questions(id));
  CHECK(res.payload["contexts"] == expected);
  CHECK(res.payload["maximal"].size() == 4);

  CHECK(ok({"contexts", "--preset", "gbit"}).payload["count"] == 3);
}

TEST_CASE("CLI output is byte-deterministic") {
  auto a = ok({"vertices", "--preset", "pr"});
  auto b = ok({"vertices", "--preset", "pr"});
  CHECK(a.payload.dump() == b.payload.dump());
  CHECK(a.payload["count"] == 24);
}

TEST_CASE("state pipeline through files mirrors direct calls") {
  auto pr = ok({"pr-box"});
  CHECK(state_from_json(pr.payload) == pr_box());

  const auto path = write_temp("cli_pr.json", pr.payload);
  CHECK(ok({"chsh", "--state", path}).payload == Json("4"));
  CHECK(ok({"chsh", "-i", path, "--approx"}).payload == Json("4"));
  CHECK(ok({"marginal", "-i", path, "--context", "a1", "--outcome", "0"})
            .payload == Json(to_string(marginal(pr_box(), "a1", "0"))));

  const auto fpath =
      write_temp("cli_chsh.json",
                 functional_to_json(chsh_functional(BoxPresentation::pr())));
  CHECK(ok({"bell", "-i", path, "--functional", fpath}).payload == Json("4"));

  auto validation = ok({"validate-state", "-i", path});
  CHECK(validation.payload["valid"] == true);
}

TEST_CASE("uniform, deterministic and mix agree with the library") {
  auto u = ok({"uniform", "--preset", "pr"});
  CHECK(state_from_json(u.payload) == uniform_state(BoxPresentation::pr()));

  auto d = ok({"deterministic", "--preset", "gbit", "--assignment",
               "{\"q1\":0,\"q2\":1}"});
  CHECK(state_from_json(d.payload) ==
        deterministic_state(BoxPresentation::gbit(),
                            GlobalAssignment{{"q1", 0}, {"q2", 1}}));

  const auto mix_path = write_temp(
      "cli_mix.json",
      Json{{"states", Json::array({ok({"pr-box"}).payload, u.payload})},
           {"weights", Json::array({"1/2", "1/2"})}});
  auto m = ok({"mix", "-i", mix_path});
  CHECK(state_from_json(m.payload) ==
        mix({pr_box(), uniform_state(BoxPresentation::pr())},
            {Rational(1, 2), Rational(1, 2)}));
}

TEST_CASE("valuation pipeline through files") {
  auto pr = ok({"pr-box"});
  const auto spath = write_temp("cli_v_state.json", pr.payload);
  auto val = ok({"state-to-valuation", "-i", spath});
  const auto vpath = write_temp("cli_val.json", val.payload);

  auto back = ok({"valuation-to-state", "-i", vpath});
  CHECK(state_from_json(back.payload) == pr_box());

  CHECK(ok({"validate-valuation", "-i", vpath}).payload["valid"] == true);

  auto rt = ok({"roundtrip", "-i", spath});
  CHECK(rt.payload["roundtrip_exact"] == true);

  auto cv = ok({"colimit-valuation", "-i", vpath});
  CHECK(cv.payload["count"] == 50);
  // bare state input works too and must agree
  CHECK(ok({"colimit-valuation", "-i", spath}).payload == cv.payload);
}

TEST_CASE("phase-space, frame, sections, colimit counts via CLI") {
  CHECK(ok({"phase-space", "--preset", "gbit"}).payload["count"] == 5);
  CHECK(ok({"phase-space", "--preset", "pr"}).payload["count"] == 25);
  CHECK(ok({"frame", "--preset", "gbit"}).payload["count"] == 17);
  CHECK(ok({"sections", "--preset", "gbit"}).payload["count"] == 17);
  CHECK(ok({"sections", "--preset", "pr", "--at", "a1,b1"}).payload["count"] ==
        16);
  CHECK(ok({"colimit", "--preset", "gbit"}).payload["count"] == 6);
}

TEST_CASE("dot outputs") {
  auto ps = ok({"phase-space", "--preset", "gbit", "--format", "dot"});
  REQUIRE(ps.is_text);
  CHECK(ps.text.find("digraph") == 0);
  CHECK(ps.text.find("cluster_0") != std::string::npos);
  // five nodes, one per point (cluster labels are bare, nodes use [label=...])
  std::size_t nodes = 0;
  for (std::size_t at = ps.text.find("[label"); at != std::string::npos;
       at = ps.text.find("[label", at + 1))
    ++nodes;
  CHECK(nodes == 5);

  auto ctx = ok({"contexts", "--preset", "pr", "--format", "dot"});
  REQUIRE(ctx.is_text);
  // 9 nodes and one covering edge per (context, added question) pair
  CHECK(std::count(ctx.text.begin(), ctx.text.end(), '\n') > 9);

  const auto path = write_temp(
      "cli_poset.json",
      poset_to_json(contexts_of(BoxPresentation::gbit())));
  auto exported = ok({"export", "-i", path, "--format", "dot"});
  REQUIRE(exported.is_text);
  CHECK(exported.text.find("n0 -> ") != std::string::npos);

  const auto pres = write_temp("cli_pres.json",
                               box_to_json(BoxPresentation::gbit()));
  auto exported_ps =
      ok({"export", "-i", pres, "--what", "phase-space", "--format", "dot"});
  REQUIRE(exported_ps.is_text);
  CHECK(exported_ps.text.find("cluster_") != std::string::npos);
}

TEST_CASE("map subcommand emits the induced maps") {
  BoxMorphism left{BoxPresentation::gbit(), BoxPresentation::pr(),
                   {{"q1", "a1"}, {"q2", "a2"}},
                   {{"P", "A"}}};
  const auto path = write_temp("cli_morphism.json", morphism_to_json(left));
  auto res = ok({"map", "-i", path});
  CHECK(res.payload["valid"] == true);
  CHECK(res.payload["context_map"]["a1,b1"] == "q1");
  CHECK(res.payload["context_map"][""] == "");
  CHECK(res.payload["phase_space_map"]["a1,b1|01"] == "q1|0");

  BoxMorphism collapse{BoxPresentation::gbit(), BoxPresentation::gbit(),
                       {{"q1", "q1"}, {"q2", "q1"}},
                       {{"P", "P"}}};
  const auto bad = write_temp("cli_morphism_bad.json",
                              morphism_to_json(collapse));
  auto res2 = ok({"map", "-i", bad});
  CHECK(res2.payload["valid"] == false);
  CHECK_FALSE(res2.payload.contains("context_map"));
}

TEST_CASE("product-check subcommand") {
  CHECK(ok({"product-check", "--left", "gbit", "--right", "gbit"})
            .payload["product"] == true);
}

TEST_CASE("error handling and exit codes") {
  auto missing = cli::run({"chsh"});
  CHECK(missing.exit_code == 1);
  CHECK(missing.status == "error");
  CHECK(missing.error_kind == "input");

  auto nofile = cli::run({"chsh", "-i", "/nonexistent/state.json"});
  CHECK(nofile.exit_code == 1);

  auto cap = cli::run({"frame", "--preset", "pr"});
  CHECK(cap.exit_code == 2);
  CHECK(cap.error_kind == "resource");

  auto lifted = cli::run({"frame", "--preset", "pr", "--cap", "30"});
  CHECK(lifted.exit_code == 0);

  auto usage = cli::run({"frame", "--format", "png", "--preset", "gbit"});
  CHECK(usage.exit_code == 1);
  CHECK(usage.error_kind == "usage");

  auto unknown = cli::run({"no-such-command"});
  CHECK(unknown.exit_code == 1);

  // validation reports are results, not errors
  auto s = uniform_state(BoxPresentation::pr());
  s.table[0][0] = 1;
  const auto path = write_temp("cli_invalid.json", state_to_json(s));
  auto res = ok({"validate-state", "-i", path});
  CHECK(res.payload["valid"] == false);
  CHECK(res.payload["diagnostics"].size() > 0);

  auto help = cli::run({"--help"});
  CHECK(help.exit_code == 0);
  CHECK(help.is_text);
}

TEST_CASE("BOXTOPOS_CAP mirrors --cap") {
  setenv("BOXTOPOS_CAP", "3", 1);
  auto res = cli::run({"frame", "--preset", "gbit"});
  unsetenv("BOXTOPOS_CAP");
  CHECK(res.exit_code == 2);
  CHECK(res.error_kind == "resource");
}

TEST_CASE("general theory input drives the diagram subcommands") {
  Json theory{
      {"contexts",
       {{"elements", {"bot", "top"}},
        {"leq", Json::array({Json::array({"bot", "top"})})}}},
      {"algebras", {{"bot", {"u"}}, {"top", {"x", "y"}}}},
      {"transitions",
       Json::array({{{"from", "bot"},
                     {"to", "top"},
                     {"map", {{"u", {"x", "y"}}}}}})}};
  const auto path = write_temp("cli_theory.json", theory);
  CHECK(ok({"contexts", "-i", path}).payload["count"] == 2);
  CHECK(ok({"phase-space", "-i", path}).payload["count"] == 3);
  CHECK(ok({"colimit", "-i", path}).payload["count"] == 4);
  CHECK(ok({"sections", "-i", path, "--at", "bot"}).payload["count"] == 5);
}
