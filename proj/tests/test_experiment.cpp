#include <gtest/gtest.h>

#include <sstream>

#include "pim/core/config.hpp"
#include "pim/experiment/acceptance.hpp"
#include "pim/experiment/sweep.hpp"
#include "pim/experiment/table.hpp"

using namespace pim;
using namespace pim::exp;

namespace {

std::vector<std::vector<std::string>> csv_cells(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> row(1);
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted && c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                row.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                row.emplace_back();
            } else {
                row.back() += c;
            }
        }
        out.push_back(row);
    }
    return out;
}

std::string cell_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return format_value(v.get<double>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    return std::to_string(v.get<std::int64_t>());
}

SweepSpec small(Experiment e) {
    SweepSpec s = default_spec(e);
    s.workers = 4;
    return s;
}

}  // namespace

TEST(Sweep, ParseNumbersRangesAndFractions) {
    using exp::detail::parse_numbers;
    EXPECT_EQ(parse_numbers("k", "1..4"), (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(parse_numbers("k", "2..10+4"), (std::vector<double>{2, 6, 10}));
    EXPECT_EQ(parse_numbers("k", "1..64*4"), (std::vector<double>{1, 4, 16, 64}));
    EXPECT_EQ(parse_numbers("k", "1/4, 3"), (std::vector<double>{0.25, 3}));
    EXPECT_EQ(parse_numbers("k", "1/256..1*2").size(), 9u);
    EXPECT_THROW(parse_numbers("k", "4..1"), ConfigError);
    EXPECT_THROW(parse_numbers("k", "1..8*1"), ConfigError);
    EXPECT_THROW(parse_numbers("k", "1/0"), ConfigError);
    EXPECT_THROW(exp::detail::parse_integers<unsigned>("k", "1.5"), ConfigError);
}

TEST(Sweep, SplitConfigSeparatesSweepKeys) {
    const auto s = split_config("# comment\nfrequency_hz = 400e6\nsweep.tasklets = 1..3 # inline\nsweep.ops = add:int32\n");
    ASSERT_EQ(s.sweep.size(), 2u);
    EXPECT_EQ(s.sweep[0], (std::pair<std::string, std::string>{"sweep.tasklets", "1..3"}));
    EXPECT_EQ(s.sweep[1].second, "add:int32");
    EXPECT_NO_THROW(load_config(s.system));
    SweepSpec spec = default_spec(Experiment::arith);
    apply_sweep_keys(spec, s.sweep);
    EXPECT_EQ(spec.tasklets, (std::vector<unsigned>{1, 2, 3}));
    EXPECT_THROW(apply_sweep_keys(spec, {{"sweep.nope", "1"}}), ConfigError);
}

TEST(Sweep, ValidateRejectsBadAxes) {
    const SystemConfig sys;
    SweepSpec s = default_spec(Experiment::arith);
    EXPECT_NO_THROW(validate(s, sys));
    s.tasklets = {};
    EXPECT_THROW(validate(s, sys), ConfigError);
    s.tasklets = {sys.dpu.max_tasklets + 1};
    EXPECT_THROW(validate(s, sys), ConfigError);
    s = default_spec(Experiment::arith);
    s.ops = {"pow:int32"};
    EXPECT_THROW(validate(s, sys), std::exception);
    s = default_spec(Experiment::bench);
    s.benchmarks = {"NOPE"};
    EXPECT_THROW(validate(s, sys), ConfigError);
    s = default_spec(Experiment::transfer);
    s.dpus = {sys.total_dpus() + 1};
    EXPECT_THROW(validate(s, sys), ConfigError);
}

TEST(Sweep, DumpedConfigReadsBack) {
    for (auto name : kExperimentNames) {
        const Experiment e = parse_experiment(name);
        SweepSpec s = default_spec(e);
        s.seed = 7;
        const std::string text = serialize(SystemConfig{}) + serialize(s);
        const auto split = split_config(text);
        SweepSpec back = default_spec(e);
        apply_sweep_keys(back, split.sweep);
        EXPECT_EQ(serialize(load_config(split.system)), serialize(SystemConfig{})) << name;
        EXPECT_EQ(serialize(back), serialize(s)) << name;
    }
}

TEST(Sweep, ReRunsAreByteIdenticalAcrossWorkerCounts) {
    const SystemConfig sys;
    for (auto e : {Experiment::arith, Experiment::mram_stream, Experiment::roofline, Experiment::transfer}) {
        SweepSpec s = small(e);
        const std::string a = to_csv(run_sweep(s, sys));
        s.workers = 1;
        const std::string b = to_csv(run_sweep(s, sys));
        EXPECT_EQ(a, b) << name(e);
        EXPECT_EQ(a, to_csv(run_sweep(s, sys))) << name(e);
    }
}

TEST(Sweep, RowsFollowGridOrder) {
    SweepSpec s = small(Experiment::arith);
    s.ops = {"mul:int32", "add:int64"};
    s.tasklets = {3, 1, 2};
    const Table t = run_sweep(s, SystemConfig{});
    ASSERT_EQ(t.rows.size(), 6u);
    const std::vector<std::string> ops = {"mul", "mul", "mul", "add", "add", "add"};
    const std::vector<std::int64_t> ts = {3, 1, 2, 3, 1, 2};
    for (std::size_t r = 0; r < 6; ++r) {
        EXPECT_EQ(std::get<std::string>(t.rows[r][0]), ops[r]);
        EXPECT_EQ(format_value(t.rows[r][2]), std::to_string(ts[r]));
    }
}

TEST(Sweep, ScaleRowsGroupByBenchmark) {
    SweepSpec s = small(Experiment::scale_weak);
    s.benchmarks = {"VA", "RED"};
    s.variants = {"single", "hands"};
    s.dpus = {1, 2};
    const Table t = run_sweep(s, SystemConfig{});
    ASSERT_EQ(t.rows.size(), 6u);
    EXPECT_EQ(format_value(t.rows[0][2]), "1");
    EXPECT_EQ(format_value(t.rows[1][2]), "2");
    EXPECT_EQ(format_value(t.rows[2][0]), "RED");
    EXPECT_EQ(format_value(t.rows[2][1]), format_value(t.rows[3][1]));
    EXPECT_NE(format_value(t.rows[3][1]), format_value(t.rows[4][1]));
}

TEST(Table, JsonHoldsEveryCsvCell) {
    const SystemConfig sys;
    for (auto e : {Experiment::arith, Experiment::transfer, Experiment::bench}) {
        SweepSpec s = small(e);
        const Table t = run_sweep(s, sys);
        const auto cells = csv_cells(to_csv(t));
        const Json j = Json::parse(to_json(t, sys, to_json(s), "2000-01-01T00:00:00Z").dump(2));
        ASSERT_EQ(cells.size(), j["rows"].size() + 1) << name(e);
        EXPECT_EQ(cells[0], j["columns"].get<std::vector<std::string>>());
        for (std::size_t r = 0; r < j["rows"].size(); ++r) {
            ASSERT_EQ(cells[r + 1].size(), t.columns.size());
            for (std::size_t c = 0; c < t.columns.size(); ++c)
                EXPECT_EQ(cells[r + 1][c], cell_text(j["rows"][r][t.columns[c]])) << name(e) << " " << t.columns[c];
        }
        EXPECT_EQ(j["config"]["frequency_hz"].get<std::string>().empty(), false);
    }
}

TEST(Table, CsvQuotesSpecialCharacters) {
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(format_value(0.1), "0.1");
    EXPECT_EQ(std::stod(format_value(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Table, RowWidthMustMatchColumns) {
    Table t;
    t.columns = {"a", "b"};
    EXPECT_THROW(t.add({std::int64_t{1}}), std::logic_error);
}

TEST(Acceptance, DefaultMemoryCriteriaPass) {
    const SystemConfig sys;
    EXPECT_TRUE(accept::mram(sys.dpu).pass());
    EXPECT_TRUE(accept::saturation(sys.dpu, 1).pass());
    EXPECT_TRUE(accept::strided(sys.dpu).pass());
    EXPECT_TRUE(accept::arithmetic(sys.dpu).pass());
    EXPECT_TRUE(accept::wram(sys.dpu).pass());
}

TEST(Acceptance, SlowReadSetupFailsMramCriteria) {
    const SystemConfig sys = load_config("dma_alpha_read_cycles = 100");
    const auto c3 = accept::mram(sys.dpu);
    EXPECT_FALSE(c3.pass());
    EXPECT_LT(c3.margin(), 0);
    EXPECT_FALSE(accept::strided(sys.dpu).pass());
    EXPECT_TRUE(accept::arithmetic(sys.dpu).pass());
}

TEST(Acceptance, MarginTracksTightestCheck) {
    Criterion c{1, "t", {}};
    c.checks.push_back(accept::relative("loose", 101, 100, 0.05));
    c.checks.push_back(accept::relative("tight", 104, 100, 0.05));
    EXPECT_EQ(c.tightest().name, "tight");
    EXPECT_NEAR(c.margin(), 0.2, 1e-9);
    c.checks.push_back(accept::at_least("floor", 90, 100));
    EXPECT_FALSE(c.pass());
    EXPECT_NEAR(c.margin(), -0.1, 1e-12);
}

TEST(Acceptance, ReportListsEveryCriterion) {
    const SystemConfig sys;
    std::vector<Criterion> r = {accept::mram(sys.dpu), accept::wram(sys.dpu)};
    const std::string text = format_report(r, false);
    EXPECT_NE(text.find("PASS  criterion 3"), std::string::npos);
    EXPECT_NE(text.find("2/2 criteria passed"), std::string::npos);
    EXPECT_TRUE(all_pass(r));
    const Table t = acceptance_table(r);
    EXPECT_EQ(t.rows.size(), r[0].checks.size() + r[1].checks.size());
}

TEST(Sweep, KeysForOtherExperimentsAreIgnored) {
    SweepSpec s = default_spec(Experiment::scale_weak);
    const SweepSpec before = s;
    apply_sweep_keys(s, {{"sweep.sizes", "8..2048*2"}, {"sweep.streams", "COPY"}});
    EXPECT_EQ(serialize(s), serialize(before));
    EXPECT_TRUE(s.sizes.empty());
    EXPECT_THROW(apply_sweep_keys(s, {{"sweep.sizes", "x"}}), ConfigError);
}
