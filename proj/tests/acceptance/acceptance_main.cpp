// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "pipeline.hpp"
#include "properties.hpp"
#include "tensorlint/driver.hpp"
#include "tensorlint/lowering.hpp"

using namespace tensorlint;
using nlohmann::json;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

driver::Report run(const std::string& py, const std::string& sidecar = "", bool strict = true) {
    driver::RunConfig cfg;
    cfg.files = {oracle::corpus_path(py)};
    if (!sidecar.empty()) cfg.annotations = oracle::corpus_path(sidecar);
    cfg.dump_types = true;
    cfg.dump_callgraph = true;
    cfg.strict_hw_order = strict;
    return driver::run(cfg);
}

std::string listing(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) out += (out.empty() ? "" : "; ") + format_diagnostic(d);
    return out.empty() ? "none" : out;
}

// Every field of `want` is present in `got` with a matching type.
bool has_fields_of(const types::TypePtr& want, const types::TypePtr& got) {
    auto* w = types::as_record(*want);
    if (!w) return types::type_equal(want, got);
    if (!types::as_record(*got)) return false;
    for (const auto& [name, t] : w->fields) {
        auto g = types::record_field(*got, name);
        if (!g || !has_fields_of(t, g)) return false;
    }
    return true;
}

Verdict mnist_cnn_example() {
    Verdict v;
    std::ifstream in(oracle::corpus_path("mnist_cnn_expected.json"));
    json expected = json::parse(in);
    auto start = std::chrono::steady_clock::now();
    auto report = run("mnist_cnn.py", "mnist.json");
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::map<int, std::vector<types::TypePtr>> got;
    for (const auto& line : report.types) got[line.line] = line.types;
    int matched = 0;
    for (const auto& point : expected["points"]) {
        int line = point["line"];
        auto want = types::parse_type(point["type"].get<std::string>(), true);
        auto it = got.find(line);
        if (it == got.end() || it->second.size() != 1) {
            v.fail("line " + std::to_string(line) + " has " +
                   (it == got.end() ? std::string("no type") : std::to_string(it->second.size()) + " types"));
            continue;
        }
        if (types::canonical(types::normalize(want)) != types::canonical(types::normalize(it->second[0]))) {
            v.fail("line " + std::to_string(line) + ": got " + types::to_string(it->second[0]));
            continue;
        }
        if (point.contains("annotation") &&
            !has_fields_of(types::parse_type(point["annotation"].get<std::string>(), true), it->second[0])) {
            v.fail("line " + std::to_string(line) + " lacks fields of the annotation");
            continue;
        }
        ++matched;
    }
    if (report.summary.errors != 0) v.fail(std::to_string(report.summary.errors) + " errors");
    if (seconds >= 5.0) v.fail("took " + std::to_string(seconds) + " s");
    std::ostringstream os;
    os << matched << "/" << expected["points"].size() << " points, " << report.summary.errors << " errors, "
       << static_cast<int>(seconds * 1000) << " ms";
    if (v.ok) v.detail = os.str();
    return v;
}

void expect_single(Verdict& v, const driver::Report& r, const std::string& code, int line) {
    if (r.diagnostics.size() != 1 || r.diagnostics[0].code != code || r.diagnostics[0].span.line_start != line)
        v.fail("expected one " + code + " at line " + std::to_string(line) + ", got " + listing(r.diagnostics));
}

Verdict mutants() {
    Verdict v;
    auto baseline = run("mnist_cnn.py", "mnist.json");
    if (!baseline.diagnostics.empty()) v.fail("baseline has " + listing(baseline.diagnostics));
    expect_single(v, run("mnist_cnn_mutant_56x14.py", "mnist.json"), codes::kReshapeFactorization, 22);
    expect_single(v, run("mnist_cnn_mutant_28x27.py", "mnist.json"), codes::kReshapeSize, 22);
    if (v.ok) v.detail = "[-1,56,14,1] -> ARI002, [-1,28,27,1] -> ARI001";
    return v;
}

Verdict swap() {
    Verdict v;
    auto r = run("mnist_cnn.py", "mnist_swapped.json", true);
    bool found = false;
    for (const auto& d : r.diagnostics)
        if (d.code == codes::kConvLabel && d.span.line_start == 24) found = true;
    if (!found) v.fail("no ARI004 at the conv2d on line 24: " + listing(r.diagnostics));
    if (v.ok) v.detail = "ARI004 at line 24";
    return v;
}

// Site of the outermost call starting on `line`.
ir::SiteId site_on_line(const analysis::Result& r, const std::string& function, int line) {
    const auto& g = r.graph;
    const auto& fn = *g.functions.at(*g.function_id(function));
    ir::SiteId site = -1;
    int col = 1 << 30;
    fn.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& i) {
        if (auto* c = i.as<ir::Invoke>(); c && i.span.line_start == line && i.span.col_start < col) {
            col = i.span.col_start;
            site = c->site;
        }
    });
    return site;
}

Verdict foo_sites() {
    Verdict v;
    auto r = run("foo.py");
    const auto& pa = *r.analysis;
    const auto init = module_init_name("foo");
    for (int line : {8, 9, 10, 13}) {
        auto names = pa.callgraph.target_names(init, site_on_line(pa, init, line));
        if (names != std::set<std::string>{"foo.Foo.foo"}) {
            std::string got;
            for (const auto& n : names) got += " " + n;
            v.fail("line " + std::to_string(line) + " targets:" + (got.empty() ? " none" : got));
        }
    }
    if (v.ok) v.detail = "lines 8, 9, 10, 13 -> foo.Foo.foo";
    return v;
}

Verdict callback() {
    Verdict v;
    auto r = run("mnist_cnn.py", "mnist.json");
    if (!r.analysis->callgraph.has_edge("tensorflow/estimator/train/train.do", "mnist_cnn.model_fn"))
        v.fail("no edge train.do -> model_fn");
    if (v.ok) v.detail = "tensorflow/estimator/train/train.do -> mnist_cnn.model_fn";
    return v;
}

Verdict api_matrix() {
    Verdict v;
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"conv_network", "++--"}, {"mnist_deep", "++-+"}, {"mnist_max", "---+"},
        {"mnist_max_xla", "---+"}, {"mnist_sum", "+--+"}, {"neuroimage", "+-+-"},
    };
    const std::vector<std::string> columns = {"reshape", "conv2d", "conv3d", "placeholder"};
    for (const auto& [name, want] : rows) {
        std::string sidecar = "api_matrix/" + name + ".json";
        std::ifstream probe(oracle::corpus_path(sidecar));
        auto r = run("api_matrix/" + name + ".py", probe ? sidecar : "");
        std::string got;
        for (const auto& col : columns) {
            bool present = false, verified = false;
            for (const auto& s : r.sites) {
                if (s.tag != col) continue;
                present = true;
                verified |= s.verdict == tensor::Verdict::Verified || s.verdict == tensor::Verdict::Partial;
            }
            got += verified ? '+' : present ? '?' : '-';
        }
        if (got != want) v.fail(name + ": got " + got + ", want " + want);
        if (r.summary.errors != 0) v.fail(name + ": " + listing(r.diagnostics));
    }
    if (v.ok) v.detail = "6/6 rows match, 0 errors";
    return v;
}

Verdict properties() {
    Verdict v;
    std::ostringstream os;
    auto note = [&](const char* label, const oracle::PropertyResult& r) {
        if (!r.ok) v.fail(std::string(label) + ": " + r.detail);
        os << (os.tellp() > 0 ? ", " : "") << label << " " << r.cases;
    };
    note("a", oracle::normalize_properties(1, 1000));
    note("b", oracle::reshape_identity_and_conservation(2, 1000));
    note("c-sampled", oracle::reshape_matches_oracle_sampled(3, 5000));
    note("c-exhaustive", oracle::reshape_matches_oracle_exhaustive());
    note("d", oracle::record_permutation_invariance(4, 1000));
    note("e", oracle::propagate_deterministic(10));
    note("f", oracle::points_to_sound(5, 200));
    if (v.ok) v.detail = "cases: " + os.str();
    return v;
}

}  // namespace

int main() {
    const std::vector<Verdict (*)()> criteria = {mnist_cnn_example, mutants, swap, foo_sites, callback, api_matrix, properties};
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        std::cout << "criterion " << i + 1 << ": " << (v.ok ? "PASS" : "FAIL") << " (" << v.detail << ")\n";
        failed += v.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
