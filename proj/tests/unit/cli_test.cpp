/*
 * Copyright 2026 The sortbo Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "sortbo/ledger_io.hpp"

namespace sortbo {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sortbo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result sortbo(const std::string& args) {
        const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        const std::string cmd = std::string(SORTBO_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    fs::path write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    std::string out(const std::string& sub = "run") { return (dir_ / sub).string(); }

    fs::path dir_;
};

// Short experiments and a small budget keep the optimizer tests quick.
const char* kQuickConfig = R"(
experiment: {duration_s: 60, interval_s: 10}
optimizer: {max_steps: 2}
)";

TEST_F(Cli, SimulateIsByteReproducible) {
    const auto r1 = sortbo("simulate --params 15,0,0 --seed 7 --out " + out());
    ASSERT_EQ(r1.code, 0) << r1.err;
    const auto first = slurp(dir_ / "run" / "ledger.jsonl");
    const auto r2 = sortbo("simulate --params 15,0,0 --seed 7 --force --out " + out());
    ASSERT_EQ(r2.code, 0) << r2.err;
    EXPECT_EQ(first, slurp(dir_ / "run" / "ledger.jsonl"));
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_NE(r1.out.find("tp_n"), std::string::npos);
    EXPECT_NE(r1.out.find("accuracy"), std::string::npos);

    std::ifstream in(dir_ / "run" / "ledger.jsonl");
    const auto records = records_of(read_ledger(in));
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].intervals.size(), 30u);
    EXPECT_EQ(records[0].params, (ParameterPoint{15, 0, 0}));
}

TEST_F(Cli, RefusesToOverwriteLedger) {
    ASSERT_EQ(sortbo("simulate --params 15,0,0 --duration 60 --out " + out()).code, 0);
    const auto before = slurp(dir_ / "run" / "ledger.jsonl");
    const auto r = sortbo("simulate --params 16,0,0 --duration 60 --out " + out());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--force"), std::string::npos);
    EXPECT_EQ(before, slurp(dir_ / "run" / "ledger.jsonl"));
}

TEST_F(Cli, SeedChangesOutput) {
    ASSERT_EQ(sortbo("simulate --params 15,0,0 --duration 60 --seed 1 --out " + out("a")).code, 0);
    ASSERT_EQ(sortbo("simulate --params 15,0,0 --duration 60 --seed 2 --out " + out("b")).code, 0);
    EXPECT_NE(slurp(dir_ / "a" / "ledger.jsonl"), slurp(dir_ / "b" / "ledger.jsonl"));
}

TEST_F(Cli, MalformedConfigNamesKey) {
    const auto cfg = write("bad.yaml", "simulator:\n  nozzle_count: lots\n");
    const auto r = sortbo("simulate --params 15,0,0 --config " + cfg.string() + " --out " + out());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("simulator.nozzle_count"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir_ / "run" / "ledger.jsonl"));

    const auto unknown = write("unknown.yaml", "experiment:\n  duraton_s: 60\n");
    const auto u = sortbo("simulate --params 15,0,0 --config " + unknown.string() + " --out " + out());
    EXPECT_EQ(u.code, 1);
    EXPECT_NE(u.err.find("experiment.duraton_s"), std::string::npos) << u.err;
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(sortbo("").code, 1);
    EXPECT_EQ(sortbo("launch").code, 1);
    EXPECT_EQ(sortbo("simulate --out " + out()).code, 1);
    EXPECT_EQ(sortbo("simulate --params 15,0 --out " + out()).code, 1);
    EXPECT_EQ(sortbo("simulate --params 15,0,0 --interval 7 --out " + out()).code, 1);
    EXPECT_EQ(sortbo("sweep --grid 12:21/0:8 --out " + out()).code, 1);
    EXPECT_EQ(sortbo("report --mode histogram --out " + out()).code, 1);
    EXPECT_EQ(sortbo("--help").code, 0);
}

TEST_F(Cli, OptimizeWeightsValidation) {
    const auto cfg = write("quick.yaml", kQuickConfig);
    const auto bad = sortbo("optimize --weights 0.7,0.4 --config " + cfg.string() + " --out " + out());
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("weights"), std::string::npos);
    const auto ok = sortbo("optimize --weights 0.7,0.3 --config " + cfg.string() + " --out " + out());
    ASSERT_EQ(ok.code, 0) << ok.err;
    EXPECT_NE(ok.out.find("status"), std::string::npos);
    EXPECT_NE(ok.out.find("best"), std::string::npos);
}

TEST_F(Cli, OptimizeBookkeepingAndStatus) {
    const auto cfg = write("quick.yaml", kQuickConfig);
    const auto r = sortbo("optimize --config " + cfg.string() + " --out " + out());
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir_ / "run" / "ledger.jsonl");
    const auto entries = read_ledger(in);
    std::size_t records = 0, proposals = 0;
    for (const auto& e : entries) {
        records += std::holds_alternative<ExperimentRecord>(e);
        proposals += std::holds_alternative<Proposal>(e);
    }
    EXPECT_EQ(records, 12 + proposals);
    EXPECT_LE(proposals, 2u);
    EXPECT_NE(r.out.find("step  T_R"), std::string::npos);
    const bool known = r.out.find("status   converged") != std::string::npos ||
                       r.out.find("status   budget exhausted") != std::string::npos;
    EXPECT_TRUE(known) << r.out;
}

TEST_F(Cli, OptimizeIsReproducibleAcrossWorkers) {
    const auto cfg = write("quick.yaml", kQuickConfig);
    ASSERT_EQ(sortbo("optimize --workers 1 --config " + cfg.string() + " --out " + out("a")).code, 0);
    ASSERT_EQ(sortbo("optimize --workers 2 --config " + cfg.string() + " --out " + out("b")).code, 0);
    EXPECT_EQ(slurp(dir_ / "a" / "ledger.jsonl"), slurp(dir_ / "b" / "ledger.jsonl"));
}

TEST_F(Cli, SweepWritesRecordsAndSurface) {
    const auto single = sortbo("sweep --grid 15/0/0 --duration 60 --out " + out("one"));
    ASSERT_EQ(single.code, 0) << single.err;
    std::ifstream one(dir_ / "one" / "ledger.jsonl");
    EXPECT_EQ(records_of(read_ledger(one)).size(), 1u);

    const auto r = sortbo("sweep --grid 14:16/0,8/0:8:4 --duration 60 --workers 2 --out " + out());
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir_ / "run" / "ledger.jsonl");
    const auto records = records_of(read_ledger(in));
    ASSERT_EQ(records.size(), 18u);
    EXPECT_EQ(records.front().params, (ParameterPoint{14, 0, 0}));
    EXPECT_EQ(records.back().params, (ParameterPoint{16, 8, 8}));
    std::ifstream csv(dir_ / "run" / "surface.csv");
    EXPECT_EQ(read_ledger_csv(csv).size(), 18u);
    EXPECT_NE(r.out.find("reference_best"), std::string::npos);

    ASSERT_EQ(sortbo("sweep --grid 14:16/0,8/0:8:4 --duration 60 --workers 1 --out " + out("serial")).code, 0);
    EXPECT_EQ(slurp(dir_ / "run" / "ledger.jsonl"), slurp(dir_ / "serial" / "ledger.jsonl"));
}

TEST_F(Cli, ReportLedgerCsv) {
    fs::create_directories(dir_ / "empty");
    write("empty/ledger.jsonl", "");
    const auto r = sortbo("report --mode ledger_csv --out " + out("empty"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir_ / "empty" / "ledger.csv"),
              "reaction_lines,extended_time,extended_space,tp_n_mean,tn_n_mean,tp_n_var,tn_n_var,timestamp\n");

    ASSERT_EQ(sortbo("simulate --params 15,2,4 --duration 60 --out " + out()).code, 0);
    ASSERT_EQ(sortbo("report --mode ledger_csv --out " + out()).code, 0);
    std::ifstream jl(dir_ / "run" / "ledger.jsonl");
    const auto rec = records_of(read_ledger(jl)).at(0);
    std::ifstream csv(dir_ / "run" / "ledger.csv");
    const auto back = read_ledger_csv(csv).at(0);
    EXPECT_EQ(back.params, rec.params);
    EXPECT_EQ(back.tp_n_mean, rec.tp_n_mean);
    EXPECT_EQ(back.tn_n_var, rec.tn_n_var);
    EXPECT_EQ(back.timestamp, rec.timestamp);
}

TEST_F(Cli, ReportNeedsLedger) {
    EXPECT_EQ(sortbo("report --mode ledger_csv --out " + out("missing")).code, 2);
    fs::create_directories(dir_ / "broken");
    write("broken/ledger.jsonl", "{\"schema_version\":1}\n");
    EXPECT_EQ(sortbo("report --mode ledger_csv --out " + out("broken")).code, 2);
}

TEST_F(Cli, ReportVarianceStudy) {
    ASSERT_EQ(sortbo("simulate --params 15,0,4 --interval 5 --out " + out()).code, 0);
    const auto r = sortbo("report --mode variance_study --out " + out());
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(dir_ / "run" / "variance_study.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "t,var");
    std::vector<double> ts;
    while (std::getline(csv, line)) ts.push_back(std::stod(line.substr(0, line.find(','))));
    EXPECT_EQ(ts, (std::vector<double>{5, 10, 20, 40}));
    EXPECT_EQ(r.out.rfind("slope ", 0), 0u);
    const double slope = std::stod(r.out.substr(6));
    EXPECT_LT(slope, 0.0);
}

TEST_F(Cli, ReportSurfaceNoiseMonotonicity) {
    ASSERT_EQ(sortbo("sweep --grid 12:18:3/0,8/0,8 --duration 60 --out " + out()).code, 0);
    const auto r = sortbo("report --mode surface --model reject --out " + out());
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(dir_ / "run" / "posterior_surface.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "lambda,reaction_lines,extended_time,extended_space,mean,variance");
    std::map<double, std::vector<double>> var;
    while (std::getline(csv, line)) {
        std::vector<double> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(std::stod(cell));
        ASSERT_EQ(f.size(), 6u);
        var[f[0]].push_back(f[5]);
    }
    ASSERT_EQ(var.size(), 4u);
    for (const auto& [lambda, v] : var) EXPECT_EQ(v.size(), 8000u) << lambda;
    for (std::size_t i = 0; i < 8000; ++i) EXPECT_GE(var[1.0][i], var[0.1][i]);
}

}  // namespace
}  // namespace sortbo
