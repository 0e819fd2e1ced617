#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <vector>

#include "posctrl/batch.hpp"
#include "posctrl/dp.hpp"
#include "posctrl/random_instances.hpp"

namespace {

using namespace posctrl;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* label, double serial, double parallel, double max_dev) {
  std::cout << label << ": serial " << serial << " s, parallel " << parallel << " s, speedup "
            << (parallel > 0 ? serial / parallel : 0.0) << "x, max |serial - parallel| = "
            << max_dev << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"timing of the enumeration and batch kernels, serial vs parallel"};
  int games = 8, game_T = 5, batch = 1024, batch_T = 5000;
  app.add_option("--games", games, "minimax games to enumerate");
  app.add_option("--game-horizon", game_T, "stages per enumerated game");
  app.add_option("--batch", batch, "instances in the recursion batch");
  app.add_option("--batch-horizon", batch_T, "stages per batched recursion");
  CLI11_PARSE(app, argc, argv);

  std::cout << "threads: " << batch_thread_count() << "\n";

  // Full 2-input 2-attack games give the enumeration 2^(2T) x 2^(2T) leaves.
  std::vector<RandomInstance> insts;
  for (std::uint64_t seed = 0; static_cast<int>(insts.size()) < games; ++seed) {
    RandomInstance inst = make_instance(9000 + seed);
    if (inst.sys.n == 2 && inst.sys.m == 2 && inst.sys.l == 2) insts.push_back(inst);
  }

  std::vector<double> serial_vals(insts.size()), parallel_vals(insts.size());
  auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < insts.size(); ++k)
    serial_vals[k] = brute_force_value_serial(insts[k].sys, insts[k].cost, game_T, insts[k].x0);
  const double enum_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < insts.size(); ++k)
    parallel_vals[k] = brute_force_value(insts[k].sys, insts[k].cost, game_T, insts[k].x0);
  const double enum_parallel = seconds_since(t0);

  double dev = 0.0;
  for (std::size_t k = 0; k < insts.size(); ++k)
    dev = std::max(dev, std::abs(serial_vals[k] - parallel_vals[k]));
  report("enumeration", enum_serial, enum_parallel, dev);

  std::vector<RandomInstance> suite(batch);
  for (int k = 0; k < batch; ++k)
    suite[k] = make_instance(40000 + static_cast<std::uint64_t>(k), fixed_point_suite_params());
  SolveOptions opts;

  std::vector<double> serial_batch(batch), parallel_batch(batch);
  auto run_one = [&](std::vector<double>& sink) {
    return [&suite, &sink, batch_T, &opts](int k) {
      const ValueSequence vs =
          backward_recursion(suite[k].sys, suite[k].cost, batch_T, opts);
      sink[k] = optimal_value(vs, suite[k].x0);
    };
  };
  t0 = std::chrono::steady_clock::now();
  for_each_index(batch, run_one(serial_batch), false);
  const double batch_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  for_each_index(batch, run_one(parallel_batch), true);
  const double batch_parallel = seconds_since(t0);

  dev = 0.0;
  for (int k = 0; k < batch; ++k)
    dev = std::max(dev, std::abs(serial_batch[k] - parallel_batch[k]));
  report("batched recursions", batch_serial, batch_parallel, dev);
  return 0;
}
