#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "osel/harness.hpp"

using namespace osel;

namespace {

const char* kTwoBox = R"({"boxes": [
  {"id": "A", "atoms": [[1, 1]]},
  {"id": "B", "atoms": [[0, 0.5], [2, 0.5]]}
]})";

std::string instance_json(const Instance& inst) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"boxes\": [";
    for (std::size_t i = 0; i < inst.size(); ++i) {
        os << (i ? "," : "") << "{\"id\": \"" << inst.box(i).id << "\", \"atoms\": [";
        const auto atoms = inst.box(i).dist.atoms();
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            os << (k ? "," : "") << '[' << atoms[k].value << ',' << atoms[k].prob << ']';
        }
        os << "]}";
    }
    os << "]}";
    return os.str();
}

std::string eval_csv(const Instance& inst, const ExperimentConfig& cfg) {
    std::ostringstream os;
    write_ratio_csv(os, cmd_eval(inst, cfg));
    return os.str();
}

std::string simulate_csv(const Instance& inst, const ExperimentConfig& cfg) {
    std::ostringstream os;
    write_simulation_csv(os, cmd_simulate(inst, cfg));
    return os.str();
}

}  // namespace

TEST_CASE("load_instance examples") {
    const auto inst = parse_instance(kTwoBox);
    CHECK(inst.size() == 2);
    CHECK(inst.box(1).id == "B");
    CHECK(inst.box(1).dist.mean() == 1.0);

    std::vector<std::string> warnings;
    const auto loose = parse_instance(R"({"boxes": [{"id": "x", "atoms": [[0, 0.5], [1, 0.499999999]]}]})", &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("'x'") != std::string::npos);
    CHECK(loose.box(0).dist.atoms()[1].prob == doctest::Approx(0.499999999 / 0.999999999).epsilon(1e-15));

    warnings.clear();
    parse_instance(kTwoBox, &warnings);
    CHECK(warnings.empty());
}

TEST_CASE("load_instance errors name the box") {
    auto message = [](const std::string& text) {
        try {
            parse_instance(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message(R"({"boxes": [{"id": "ok", "atoms": [[1, 1]]}, {"id": "bad", "atoms": [[1]]}]})")
              .find("'bad'") != std::string::npos);
    CHECK(message(R"({"boxes": [{"id": "q", "atoms": [[1, "x"]]}]})").find("'q'") != std::string::npos);
    CHECK(message(R"({"boxes": [{"id": "s", "atoms": [[0, 0.5], [1, 0.4]]}]})").find("'s'") != std::string::npos);
    CHECK(message(R"({"boxes": [{"id": "n", "atoms": [[-1, 1]]}]})").find("'n'") != std::string::npos);
    CHECK(message(R"({"boxes": [{"id": "d", "atoms": [[1, 1]]}, {"id": "d", "atoms": [[2, 1]]}]})")
              .find("d") != std::string::npos);
    CHECK(message(R"({"boxes": []})") != "no error");
    CHECK(message(R"({"boxes": [{"atoms": [[1, 1]]}]})").find("#0") != std::string::npos);
    CHECK(message("{not json") .find("JSON") != std::string::npos);
    CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), ValidationError);
}

TEST_CASE("shipped example instances load") {
    for (const char* name : {"two_box.json", "three_iid.json"}) {
        std::vector<std::string> warnings;
        const auto inst = load_instance(std::string(OSEL_DATA_DIR) + "/" + name, &warnings);
        CHECK(warnings.empty());
        CHECK(inst.size() >= 2);
    }
}

TEST_CASE("flag parsing") {
    CHECK(parse_policy("tvd-rand-732") == PolicyChoice::tvd_rand_732);
    CHECK_THROWS_AS(parse_policy("greedy"), UsageError);
    CHECK(parse_order_mode("all").kind == OrderMode::Kind::all);
    CHECK(parse_order_mode("random:12").count == 12);
    CHECK_THROWS_AS(parse_order_mode("random:0"), UsageError);
    CHECK_THROWS_AS(parse_order_mode("random:x"), UsageError);
    CHECK(parse_order_mode("orders.txt").kind == OrderMode::Kind::file);
    CHECK(parse_target("phi").kind == TargetSpec::Kind::phi);
    CHECK(parse_target("opt").kind == TargetSpec::Kind::opt);
    CHECK(parse_target("1.25").value == 1.25);
    CHECK_THROWS_AS(parse_target("-1"), UsageError);
    CHECK_THROWS_AS(parse_target("1.2x"), UsageError);
}

TEST_CASE("order modes") {
    const auto inst = parse_instance(kTwoBox);
    ExperimentConfig cfg;
    CHECK(resolve_orders(inst, cfg).size() == 1);
    cfg.orders.kind = OrderMode::Kind::all;
    CHECK(resolve_orders(inst, cfg).size() == 2);
    cfg.orders = parse_order_mode("random:5");
    CHECK_THROWS_AS(resolve_orders(inst, cfg), UsageError);
    cfg.seed = 3;
    const auto r = resolve_orders(inst, cfg);
    CHECK(r.size() == 5);
    CHECK(r == resolve_orders(inst, cfg));

    const auto path = std::filesystem::temp_directory_path() / "osel_orders_test.txt";
    {
        std::ofstream f(path);
        f << "# comment\nB, A\n\nA,B\n";
    }
    cfg.orders = parse_order_mode(path.string());
    const auto fo = resolve_orders(inst, cfg);
    REQUIRE(fo.size() == 2);
    CHECK(fo[0].describe(inst) == "B A");
    {
        std::ofstream f(path);
        f << "A,C\n";
    }
    CHECK_THROWS_AS(resolve_orders(inst, cfg), ValidationError);
    std::filesystem::remove(path);
}

TEST_CASE("enumeration guard") {
    std::vector<Box> boxes;
    for (int i = 0; i < 10; ++i) boxes.push_back({"b" + std::to_string(i), DiscreteDistribution::point(i)});
    const Instance big(std::move(boxes));
    ExperimentConfig cfg;
    cfg.orders.kind = OrderMode::Kind::all;
    CHECK_THROWS_AS(cmd_eval(big, cfg), UsageError);
}

TEST_CASE("cmd_eval examples") {
    const auto inst = parse_instance(kTwoBox);
    ExperimentConfig cfg;
    cfg.orders.kind = OrderMode::Kind::all;
    cfg.policy = PolicyChoice::tva;
    const auto rep = cmd_eval(inst, cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.min_ratio >= 0.618);
    CHECK(rep.rows[rep.argmin].ratio == rep.min_ratio);

    const Instance one({{"x", DiscreteDistribution({{0.0, 0.3}, {4.0, 0.7}})}});
    for (auto p : {PolicyChoice::sta, PolicyChoice::tva, PolicyChoice::tvd}) {
        ExperimentConfig c1;
        c1.policy = p;
        c1.g0 = parse_target("0");
        c1.tau = 0.0;
        CHECK(cmd_eval(one, c1).min_ratio == 1.0);
    }

    oracle::Generator gen(51);
    for (int i = 0; i < 5; ++i) {
        std::vector<Box> boxes;
        for (int k = 0; k < 4; ++k) boxes.push_back({"b" + std::to_string(k), gen.distribution(3)});
        const Instance four(std::move(boxes));
        ExperimentConfig c2;
        c2.orders.kind = OrderMode::Kind::all;
        c2.policy = PolicyChoice::tvd_rand_732;
        c2.grid = 400;
        CHECK(cmd_eval(four, c2).min_ratio >= 0.732 - 1e-3);
    }
}

TEST_CASE("cmd_eval with the known optimum reports ratio one") {
    oracle::Generator gen(52);
    for (int i = 0; i < 20; ++i) {
        const auto inst = gen.instance(6, 4);
        ExperimentConfig cfg;
        cfg.orders.kind = OrderMode::Kind::all;
        cfg.g0 = parse_target("opt");
        for (const auto& row : cmd_eval(inst, cfg).rows) {
            CHECK(row.ratio >= 1.0 - 1e-9);
            CHECK(row.ratio <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("cmd_eval output is deterministic across thread counts") {
    oracle::Generator gen(53);
    const auto inst = gen.instance(6, 4);
    ExperimentConfig cfg;
    cfg.orders.kind = OrderMode::Kind::all;
    cfg.policy = PolicyChoice::tva_rand_656;
    cfg.grid = 100;
    cfg.threads = 1;
    const auto a = eval_csv(inst, cfg);
    cfg.threads = 4;
    CHECK(eval_csv(inst, cfg) == a);
    CHECK(a.rfind("order_index,order,opt,param,alg,ratio\n", 0) == 0);
}

TEST_CASE("instance JSON round trip preserves values") {
    oracle::Generator gen(54);
    for (int i = 0; i < 50; ++i) {
        const auto inst = gen.instance(5, 4);
        const auto back = parse_instance(instance_json(inst));
        REQUIRE(back.size() == inst.size());
        for (std::size_t k = 0; k < inst.size(); ++k) CHECK(back.box(k).dist == inst.box(k).dist);
    }
}

TEST_CASE("cmd_simulate examples") {
    const Instance det({{"a", DiscreteDistribution::point(0.25)}, {"b", DiscreteDistribution::point(1.5)}});
    ExperimentConfig cfg;
    cfg.orders.kind = OrderMode::Kind::all;
    cfg.runs = 1000;
    CHECK_THROWS_AS(cmd_simulate(det, cfg), UsageError);
    cfg.seed = 1;
    for (auto p : {PolicyChoice::sta, PolicyChoice::tva, PolicyChoice::tvd}) {
        cfg.policy = p;
        for (const auto& r : cmd_simulate(det, cfg)) {
            CHECK(r.z == 0.0);
            CHECK(r.mean == r.exact);
        }
    }

    const auto two = parse_instance(kTwoBox);
    ExperimentConfig mc;
    mc.orders.kind = OrderMode::Kind::all;
    mc.seed = 2024;
    mc.runs = 100000;
    for (auto p : {PolicyChoice::sta, PolicyChoice::tva, PolicyChoice::tvd}) {
        mc.policy = p;
        for (const auto& r : cmd_simulate(two, mc)) {
            CHECK(r.runs == 100000);
            CHECK(std::abs(r.z) <= 4.0);
        }
    }

    mc.threads = 1;
    const auto first = simulate_csv(two, mc);
    mc.threads = 3;
    CHECK(simulate_csv(two, mc) == first);
    CHECK(simulate_csv(two, mc) == first);
}

TEST_CASE("cmd_hardness and cmd_verify_density exit codes") {
    std::ostringstream ok;
    HardnessConfig cfg;
    cfg.primal_step = 0.01;
    CHECK(cmd_hardness(cfg, ok) == kExitOk);
    const std::string text = ok.str();
    CHECK(text.find("general-dual,10000,0.829") != std::string::npos);
    CHECK(text.find("tvd-dual,10000,0.758") != std::string::npos);

    std::ostringstream broken;
    cfg.inject_broken = true;
    CHECK(cmd_hardness(cfg, broken) == kExitCertificate);

    std::ostringstream refine;
    HardnessConfig r;
    r.refine = true;
    r.primal_step = 0.004;
    CHECK(cmd_hardness(r, refine) == kExitOk);
    std::istringstream lines(refine.str());
    std::string line;
    int general_rows = 0;
    while (std::getline(lines, line)) general_rows += line.rfind("general-primal", 0) == 0;
    CHECK(general_rows == 3);

    std::ostringstream dens;
    CHECK(cmd_verify_density(1000, dens) == kExitOk);
    CHECK(dens.str().find("rho-732,") != std::string::npos);
    CHECK_THROWS_AS(cmd_verify_density(10, dens), UsageError);
}
