// acheck: check the theorems of one or more theorem files against their
// shipped proof outlines.
//
// Exit status: 0 when every theorem is accepted (and every replay passes),
// 1 when some theorem is rejected, runs out of steps or fails replay,
// 2 on usage errors, unreadable or malformed files and trace write errors.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "acheck/frontend.hpp"
#include "acheck/kernel.hpp"
#include "acheck/outline.hpp"
#include "acheck/trace.hpp"

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  uint64_t max_steps = 1'000'000;
  bool stop_on_failure = false;
  std::string trace_dir;
  bool replay = false;
  unsigned jobs = 1;
};

struct FileOutcome {
  std::string out;
  std::string err;
  int code = 0;
};

FileOutcome run_file(const std::string& path, const RunConfig& cfg) {
  using namespace acheck;
  FileOutcome r;
  std::ifstream in(path);
  if (!in) {
    r.err = path + ": cannot read file\n";
    r.code = 2;
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  Theory theory;
  try {
    theory = elaborate(parse_file(buf.str()));
  } catch (const ParseError& e) {
    r.err = path + ":" + e.what() + "\n";
    r.code = 2;
    return r;
  }

  SessionOptions opts;
  opts.limits.max_steps = cfg.max_steps;
  opts.stop_on_failure = cfg.stop_on_failure;
  const SessionResult session = run_session(theory, outline_fpc(), opts);

  std::ostringstream out;
  std::size_t accepted = 0, replayed = 0;
  for (const auto& t : session.theorems) {
    const std::string& name = t.name.name();
    switch (t.verdict) {
      case Verdict::Accepted: {
        ++accepted;
        const TraceStats st = trace_stats(*t.trace);
        out << name << ": ok (decides=" << st.decides << ", unfoldL=" << st.unfold_left
            << ", unfoldR=" << st.unfold_right << ", steps=" << t.steps << ")\n";
        break;
      }
      case Verdict::Rejected:
        out << name << ": FAIL " << t.diagnostic << "\n";
        r.code = std::max(r.code, 1);
        break;
      case Verdict::OutOfBudget:
        out << name << ": BUDGET\n";
        r.code = std::max(r.code, 1);
        break;
    }
    if (t.verdict != Verdict::Accepted) continue;

    if (!cfg.trace_dir.empty()) {
      namespace fs = std::filesystem;
      std::error_code ec;
      fs::create_directories(cfg.trace_dir, ec);
      const fs::path file = fs::path(cfg.trace_dir) / (fs::path(path).stem().string() + "." + name + ".trace");
      std::ofstream tf(file);
      if (tf) write_trace(tf, *t.trace, name);
      if (!tf) {
        r.err += file.string() + ": cannot write trace\n";
        r.code = 2;
      }
    }
    if (cfg.replay) {
      const LemmaTable lemmas(session.lemmas.begin(), session.lemmas.begin() + static_cast<std::ptrdiff_t>(t.lemmas_available));
      const ReplayResult rr = verify_trace(theory.defs, lemmas, t.statement, *t.trace);
      if (rr) {
        ++replayed;
      } else {
        r.err += path + ": replay of " + name + " failed: " + rr.diagnostic + "\n";
        r.code = std::max(r.code, 1);
      }
    }
  }
  if (cfg.replay) out << "replay: " << replayed << "/" << accepted << " ok\n";
  r.out = out.str();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Check theorem files against their shipped proof outlines."};
  app.add_option("files", cfg.inputs, "Theorem files")->required();
  app.add_option("--trace", cfg.trace_dir, "Write a trace per accepted theorem into this directory");
  app.add_flag("--replay", cfg.replay, "Re-verify every accepted proof from its trace");
  app.add_option("--max-steps", cfg.max_steps, "Search step limit per theorem")->check(CLI::PositiveNumber);
  app.add_flag("--stop-on-failure", cfg.stop_on_failure, "Stop a file at its first failing theorem");
  app.add_option("--jobs", cfg.jobs, "Files checked in parallel")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::vector<FileOutcome> outcomes(cfg.inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cfg.inputs.size();) outcomes[i] = run_file(cfg.inputs[i], cfg);
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<std::size_t>(cfg.jobs, cfg.inputs.size());
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (cfg.inputs.size() > 1) std::cout << "# " << cfg.inputs[i] << "\n";
    std::cout << outcomes[i].out << std::flush;
    std::cerr << outcomes[i].err << std::flush;
    code = std::max(code, outcomes[i].code);
  }
  return code;
}
