#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int status;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run lpx(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " \"" LPX_CLI_PATH "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string prog(const std::string& name) { return std::string("\"" LPX_PROGRAMS_DIR "/") + name + "\""; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lpx_cli_" + name)).string();
}

}  // namespace

TEST_CASE("parse prints the program and its classification") {
  auto r = lpx("parse " + prog("pq.lp"));
  CHECK(r.status == 0);
  CHECK(r.out.find("p ; q.") != std::string::npos);
  CHECK(r.out.find("% normal: no") != std::string::npos);
  CHECK(r.out.find("% head-cycle-free: yes") != std::string::npos);
}

TEST_CASE("syntax errors exit 2 with a location") {
  auto r = lpx("parse " + prog("bad.lp"));
  CHECK(r.status == 2);
  CHECK(r.out.find("bad.lp:2:1:") != std::string::npos);
  CHECK(r.out.find("equality in rule head") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(lpx("").status == 2);
  CHECK(lpx("frobnicate").status == 2);
  CHECK(lpx("solve " + prog("pq.lp")).status == 2);
  CHECK(lpx("transform --kind nonsense " + prog("pq.lp")).status == 2);
  CHECK(lpx("parse /nonexistent/file.lp").status == 2);
}

TEST_CASE("solve enumerates stable expansions") {
  auto r = lpx("--json solve " + prog("pq.lp") + " --domain-size 1 --aux p,q");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["command"] == "solve");
  CHECK(j["count"] == 2);

  auto c = lpx("--json solve " + prog("closure.lp") + " --structure " + prog("closure_graph.json"));
  REQUIRE(c.status == 0);
  auto cj = nlohmann::json::parse(c.out);
  REQUIRE(cj["count"] == 1);
  CHECK(cj["expansions"][0]["predicates"]["path"] == nlohmann::json::parse("[[0,1],[0,2],[1,2]]"));

  auto col = lpx("--json solve " + prog("coloring.lp") + " --structure " + prog("closure_graph.json"));
  REQUIRE(col.status == 0);
  CHECK(nlohmann::json::parse(col.out)["count"] == 2);
}

TEST_CASE("the enumeration cap is read from the environment") {
  CHECK(lpx("solve " + prog("pq.lp") + " --domain-size 1", "LPX_ENUM_CAP=abc").status == 2);
  CHECK(lpx("solve " + prog("pq.lp") + " --domain-size 1", "LPX_ENUM_CAP=0").status == 2);
  CHECK(lpx("solve " + prog("pq.lp") + " --domain-size 1", "LPX_ENUM_CAP=100").status == 0);
}

TEST_CASE("output is deterministic") {
  for (const auto& args : {"solve " + prog("coloring.lp") + " --structure " + prog("closure_graph.json"),
                           "claim1 " + prog("chain.lp") + " --base " + prog("chain_base.lp") + " --dump-codes",
                           "progress " + prog("closure.lp") + " --structure " + prog("closure_graph.json")}) {
    auto a = lpx(args), b = lpx(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("progress traces stages up to the fixpoint") {
  auto r = lpx("--json progress " + prog("pq.lp") + " --domain-size 1");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["fixpoint_stage"] == 1);
  CHECK(j["fixpoint"] == nlohmann::json::parse(R"(["p | q"])"));
}

TEST_CASE("check-equiv accepts a shifted program and reports a difference") {
  auto same = lpx("check-equiv " + prog("pq.lp") + " " + prog("pq_shifted.lp"));
  CHECK(same.status == 0);

  std::string only_p = temp_path("only_p.lp");
  std::ofstream(only_p) << "p.\nq :- p, not p.\n";
  auto differ = lpx("--json check-equiv " + prog("pq.lp") + " \"" + only_p + "\" --max-domain 1");
  CHECK(differ.status == 1);
  auto j = nlohmann::json::parse(differ.out.substr(0, differ.out.rfind('}') + 1));
  CHECK(j["equivalent"] == false);
  CHECK(j["witness"]["only_in"] == "first");
}

TEST_CASE("transform writes programs and manifests") {
  auto r = lpx("transform --kind shift " + prog("pq.lp"));
  CHECK(r.status == 0);
  CHECK(r.out == "p :- not q.\nq :- not p.\n");

  std::string out = temp_path("shifted.lp"), manifest = temp_path("manifest.json");
  auto w = lpx("transform --kind dlp2nlp " + prog("pq.lp") + " --out \"" + out + "\" --manifest \"" + manifest + "\"");
  REQUIRE(w.status == 0);
  auto m = nlohmann::json::parse(std::ifstream(manifest));
  CHECK(m["schema"] == 1);
  CHECK(lpx("parse \"" + out + "\"").status == 0);

  auto j = nlohmann::json::parse(lpx("--json transform --kind parity --k 1 --pred p").out);
  CHECK(j["schema"] == 1);
  CHECK(j["command"] == "transform");

  auto t = lpx("--json transform --kind nlp2theory " + prog("pq_shifted.lp"));
  REQUIRE(t.status == 0);
  CHECK(nlohmann::json::parse(t.out).contains("order_width"));

  CHECK(lpx("transform --kind shift " + prog("coloring.lp")).status == 0);
  CHECK(lpx("transform --kind combine --fin " + prog("pq.lp")).status == 2);
}

TEST_CASE("claim1 passes on the sample program") {
  auto r = lpx("claim1 " + prog("chain.lp") + " --base " + prog("chain_base.lp") + " --stages 4 --dump-codes");
  CHECK(r.status == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("clause[q(1) | r(1)]") != std::string::npos);

  auto j = nlohmann::json::parse(lpx("--json claim1 " + prog("chain.lp") + " --base " + prog("chain_base.lp")).out);
  CHECK(j["schema"] == 1);
  CHECK(j["pass"] == true);
  CHECK(j["stages"].size() == 5);

  CHECK(lpx("claim1 " + prog("closure.lp") + " --base " + prog("pq.lp")).status == 2);
}

TEST_CASE("sm-formula prints a second-order sentence") {
  auto r = lpx("sm-formula " + prog("pq.lp"));
  CHECK(r.status == 0);
  CHECK(r.out.find("forall2") != std::string::npos);
}
