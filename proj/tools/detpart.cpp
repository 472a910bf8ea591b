// detpart: partition a hypergraph or graph file, or check that repeated runs
// with different thread counts produce identical results.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "detpart/config.h"
#include "detpart/io.h"
#include "detpart/parallel.h"
#include "detpart/partitioner.h"

namespace {

constexpr int kExitBalanced = 0;
constexpr int kExitInputError = 1;
constexpr int kExitImbalanced = 2;
constexpr int kExitDiverged = 3;

struct Options {
  std::string input;
  int k = 0;
  std::string epsilon = "0.03";
  std::uint64_t seed = 0;
  int threads = 0;
  std::string preset = "detjet";
  std::string output;
  std::string json;
  std::vector<std::string> overrides;
  std::string format;
  std::vector<int> thread_set{1, 2, 4, 8};
  int repeats = 2;
};

void add_common(CLI::App& app, Options& o) {
  app.add_option("-i,--input", o.input, "hypergraph (.hgr) or graph (.graph/.metis) file")->required();
  app.add_option("-k,--blocks", o.k, "number of blocks")->required();
  app.add_option("-e,--epsilon", o.epsilon, "imbalance tolerance as a decimal, e.g. 0.03");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--threads", o.threads, "worker threads (default: $DETPART_THREADS or all cores)");
  app.add_option("--preset", o.preset, "detjet or detflows");
  app.add_option("--set", o.overrides, "config override key=value (repeatable)");
  app.add_option("--format", o.format, "input format: hmetis or metis (default: by extension)");
}

int default_threads() {
  if (const char* env = std::getenv("DETPART_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Run {
  detpart::Hypergraph hg;
  detpart::Config config;
  detpart::Rational epsilon;
};

Run prepare(const Options& o) {
  if (o.k < 1) throw std::invalid_argument("k must be at least 1");
  Run run;
  run.epsilon = detpart::Rational::parse(o.epsilon);
  if (run.epsilon.num < 0) throw std::invalid_argument("epsilon must be non-negative");
  run.config = detpart::Config::from_preset(o.preset);
  for (const std::string& kv : o.overrides) run.config.set(kv);
  run.config.validate();
  detpart::InputFormat format;
  if (o.format == "hmetis") format = detpart::InputFormat::kHmetis;
  else if (o.format == "metis") format = detpart::InputFormat::kMetis;
  else if (o.format.empty()) format = detpart::detect_format(o.input);
  else throw std::invalid_argument("unknown format '" + o.format + "'");
  run.hg = detpart::read_hypergraph_file(o.input, format);
  return run;
}

detpart::RunRecord make_record(const Options& o, int threads, const detpart::PartitionResult& result) {
  detpart::RunRecord record;
  record.instance = std::filesystem::path(o.input).filename().string();
  record.k = o.k;
  record.epsilon = o.epsilon;
  record.seed = o.seed;
  record.threads = threads;
  record.preset = o.preset;
  record.times = result.times;
  record.metric = result.metric;
  record.imbalance = result.imbalance;
  record.balanced = result.balanced;
  record.partition_hash = detpart::partition_hash(result.assignment);
  record.phase_hashes = result.phase_hashes;
  return record;
}

int partition_command(const Options& o) {
  const Run run = prepare(o);
  const int threads = o.threads > 0 ? o.threads : default_threads();
  const detpart::Executor exec(threads);
  const auto result = detpart::partition_hypergraph(run.hg, o.k, run.epsilon, o.seed, run.config, exec);
  if (!o.output.empty()) detpart::write_partition_file(o.output, result.assignment);
  if (!o.json.empty()) detpart::append_run_record(o.json, make_record(o, threads, result));
  std::cout << "metric " << result.metric << " imbalance " << result.imbalance << " hash "
            << detpart::hash_to_hex(detpart::partition_hash(result.assignment))
            << (result.balanced ? "" : " IMBALANCED") << "\n";
  return result.balanced ? kExitBalanced : kExitImbalanced;
}

int verify_command(const Options& o) {
  const Run run = prepare(o);
  if (o.thread_set.empty() || o.repeats < 1) throw std::invalid_argument("empty thread set or repeats < 1");
  struct Observed {
    int threads;
    int repeat;
    std::vector<detpart::PhaseHash> phases;
  };
  std::optional<Observed> reference;
  int runs = 0;
  for (int threads : o.thread_set) {
    if (threads < 1) throw std::invalid_argument("thread counts must be positive");
    const detpart::Executor exec(threads);
    for (int r = 0; r < o.repeats; ++r) {
      const auto result = detpart::partition_hypergraph(run.hg, o.k, run.epsilon, o.seed, run.config, exec);
      Observed seen{threads, r, result.phase_hashes};
      seen.phases.push_back({"final", detpart::partition_hash(result.assignment)});
      ++runs;
      if (!reference) {
        reference = std::move(seen);
        continue;
      }
      const auto& a = reference->phases;
      const auto& b = seen.phases;
      for (std::size_t p = 0; p < std::max(a.size(), b.size()); ++p) {
        if (p < a.size() && p < b.size() && a[p] == b[p]) continue;
        const std::string phase = p < a.size() ? a[p].phase : b[p].phase;
        std::cout << "DIVERGED at phase " << phase << ": threads=" << reference->threads << " repeat "
                  << reference->repeat << " vs threads=" << threads << " repeat " << r << "\n";
        return kExitDiverged;
      }
    }
  }
  std::cout << "identical across " << runs << " runs, hash " << detpart::hash_to_hex(reference->phases.back().hash)
            << "\n";
  return kExitBalanced;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multilevel hypergraph partitioner"};
  app.set_version_flag("--version", "detpart 0.1");
  Options options;
  add_common(app, options);
  app.add_option("-o,--output", options.output, "partition output file (one block id per line)");
  app.add_option("--json", options.json, "append a JSON run record to this file");

  Options verify_options;
  CLI::App* verify = app.add_subcommand("verify", "run repeatedly across thread counts and compare hashes");
  add_common(*verify, verify_options);
  verify->add_option("--thread-set", verify_options.thread_set, "thread counts, e.g. 1,2,4,8")->delimiter(',');
  verify->add_option("--repeats", verify_options.repeats, "runs per thread count");

  // The subcommand carries its own required flags.
  app.require_subcommand(0, 1);
  for (CLI::Option* opt : app.get_options()) {
    if (opt->get_name() == "--input" || opt->get_name() == "--blocks") opt->required(false);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (verify->parsed()) return verify_command(verify_options);
    if (options.input.empty() || app.count("-k") == 0) {
      std::cerr << "error: -i and -k are required\n" << app.help();
      return kExitInputError;
    }
    return partition_command(options);
  } catch (const detpart::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}
