// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// hdp: validate, partition and run scenarios; serve the control-plane API.
//
// Exit status: 0 success, 1 input error, 2 infeasible partition.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hdp/control_plane.h"
#include "hdp/error.h"
#include "hdp/partition.h"
#include "hdp/program_io.h"
#include "hdp/report.h"
#include "hdp/runtime.h"
#include "hdp/scenario.h"
#include "hdp/topology.h"

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool paths = false;
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw hdp::Error(hdp::ErrorCode::kIo, "cannot write '" + path + "'");
  f << text;
  if (!f) throw hdp::Error(hdp::ErrorCode::kIo, "write failed for '" + path + "'");
}

void Emit(const Options& o, const ojson& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    WriteText(o.out, text);
  }
}

hdp::Scenario Load(const Options& o) {
  if (o.scenario.empty()) {
    throw hdp::Error(hdp::ErrorCode::kInvalidArgument, "no scenario given");
  }
  hdp::Scenario s = hdp::LoadScenario(o.scenario);
  if (o.seed) s.seed = *o.seed;
  return s;
}

int Validate(const Options& o) {
  const hdp::Scenario s = Load(o);
  const hdp::ScenarioInputs in = hdp::LoadInputs(s);
  ojson doc;
  doc["status"] = "ok";
  doc["program"] = in.program.name;
  doc["stages"] = in.program.stages.size();
  doc["chain"] = in.topology.chain();
  Emit(o, doc);
  return 0;
}

int PartitionCmd(const Options& o) {
  const hdp::Scenario s = Load(o);
  const hdp::ScenarioInputs in = hdp::LoadInputs(s);
  const hdp::PartitionPlan plan = hdp::Partition(in.program, in.topology, in.constraint);
  const ojson doc = hdp::PlanToJson(plan);
  if (o.out.empty()) {
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  std::filesystem::create_directories(o.out);
  WriteText((std::filesystem::path(o.out) / "plan.json").string(), doc.dump(2) + "\n");
  for (const auto& [target, text] : hdp::EmitSubprograms(in.program, plan)) {
    WriteText((std::filesystem::path(o.out) / (target + ".prog.json")).string(), text);
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int Run(const Options& o) {
  const hdp::Scenario s = Load(o);
  const hdp::ScenarioResult r = hdp::RunScenario(s);
  ojson doc = hdp::ReportToJson(r.report);
  if (o.paths) {
    ojson paths = ojson::array();
    for (const hdp::PathRecord& p : r.paths) paths.push_back(hdp::PathToJson(p));
    doc["paths"] = paths;
  }
  Emit(o, doc);
  return 0;
}

// Requests on stdin, one JSON document per line; one response line each.
int Api(const Options& o) {
  const hdp::Scenario s = Load(o);
  const hdp::ScenarioInputs in = hdp::LoadInputs(s);
  const hdp::PartitionPlan plan = hdp::Partition(in.program, in.topology, in.constraint);
  hdp::ControlPlane cp(in.program, plan, s.policies);
  hdp::Simulator sim(in.program, in.topology, plan, cp);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::cout << cp.HandleLine(line) << "\n" << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous data plane partitioner and simulator"};
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario file");
    sub->add_option("scenario_path", o.scenario, "Scenario file");
    sub->add_option("--seed", o.seed, "Override the scenario seed");
    sub->add_option("--out", o.out, "Output file (directory for partition)");
  };
  CLI::App* validate = app.add_subcommand("validate", "Check program and topology");
  CLI::App* partition = app.add_subcommand("partition", "Emit plan and sub-programs");
  CLI::App* run = app.add_subcommand("run", "Run the scenario and print a report");
  CLI::App* api = app.add_subcommand("api", "Control-plane requests on stdin");
  for (CLI::App* sub : {validate, partition, run, api}) add_common(sub);
  run->add_flag("--paths", o.paths, "Include per-packet path records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*validate) return Validate(o);
    if (*partition) return PartitionCmd(o);
    if (*run) return Run(o);
    if (*api) return Api(o);
  } catch (const hdp::Error& e) {
    std::cerr << "hdp: " << e.what() << "\n";
    return hdp::IsInfeasible(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "hdp: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
