#include "tensorlint/driver.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "tensorlint/lowering.hpp"
#include "tensorlint/model.hpp"
#include "tensorlint/parser.hpp"

#ifndef TENSORLINT_BUNDLED_MODEL_DIR
#define TENSORLINT_BUNDLED_MODEL_DIR "models"
#endif

namespace tensorlint::driver {

namespace fs = std::filesystem;

namespace {

Report fail(std::string message) {
    Report r;
    r.exit_code = 2;
    r.failure = std::move(message);
    return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

std::vector<std::string> model_search_path() {
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("TENSORLINT_MODEL_DIR"))
        for (auto& d : split(env, ':')) dirs.push_back(d);
    dirs.push_back(TENSORLINT_BUNDLED_MODEL_DIR);
    return dirs;
}

std::optional<std::string> resolve_model(const std::string& spec) {
    std::error_code ec;
    if (fs::is_regular_file(spec, ec)) return spec;
    if (spec.find('/') != std::string::npos) return std::nullopt;
    for (const auto& dir : model_search_path()) {
        for (const auto& name : {spec, spec + ".json"}) {
            fs::path p = fs::path(dir) / name;
            if (fs::is_regular_file(p, ec)) return p.string();
        }
    }
    return std::nullopt;
}

int exit_code_for(const Summary& summary, bool fail_on_error) {
    if (summary.errors > 0) return 1;
    if (fail_on_error && summary.warnings > 0) return 1;
    return 0;
}

Report run(const RunConfig& config) {
    if (config.files.empty()) return fail("no input files");

    model::ModelSpec models;
    std::vector<std::string> wanted = config.models;
    if (wanted.empty()) wanted.push_back("tensorflow");
    for (const auto& m : wanted) {
        auto path = resolve_model(m);
        if (!path) return fail("model not found: " + m);
        try {
            model::merge(models, model::load_model(*path));
        } catch (const model::ModelError& e) {
            return fail(e.what());
        }
    }

    std::vector<tensor::InputDeclaration> decls;
    if (config.annotations) {
        try {
            decls = tensor::load_declarations_file(*config.annotations);
        } catch (const tensor::DeclarationError& e) {
            return fail(e.what());
        }
    }

    std::vector<ir::FunctionPtr> entry;
    std::set<std::string> module_names;
    for (const auto& file : config.files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) return fail(file + ": cannot open");
        std::stringstream text;
        text << in.rdbuf();
        std::string module = module_name_for_path(file);
        if (!module_names.insert(module).second) return fail(file + ": duplicate module name '" + module + "'");
        try {
            auto ast = parse_module(text.str(), file);
            for (auto& f : lower_module(*ast, module)) entry.push_back(std::make_shared<const ir::IRFunction>(std::move(f)));
        } catch (const FrontendError& e) {
            return fail(e.what());
        }
    }

    tensor::Config tcfg;
    tcfg.check.strict_hw_order = config.strict_hw_order;
    if (config.numeric_labels)
        tcfg.check.numeric = std::set<std::string>(config.numeric_labels->begin(), config.numeric_labels->end());
    tcfg.widen_cap = config.widen_cap;

    Report report;
    auto pa = analysis::build(entry, models);
    auto est = tensor::propagate(pa, decls, models, tcfg);
    auto checked = tensor::check(pa, est, models, tcfg);

    for (const auto* list : {&pa.diagnostics, &est.diagnostics, &checked.diagnostics})
        report.diagnostics.insert(report.diagnostics.end(), list->begin(), list->end());
    sort_diagnostics(report.diagnostics);
    for (const auto& d : report.diagnostics) {
        if (d.severity == Severity::Error) ++report.summary.errors;
        if (d.severity == Severity::Warning) ++report.summary.warnings;
    }
    report.sites = checked.sites;
    if (config.dump_types) report.types = tensor::dump_types(pa, est);
    if (config.dump_callgraph) report.callgraph = analysis::dump_json(pa);
    report.exit_code = exit_code_for(report.summary, config.fail_on_error);
    report.analysis = std::move(pa);
    return report;
}

void render_text(const Report& report, const RunConfig& config, std::ostream& out) {
    if (config.dump_types)
        for (const auto& line : report.types) out << tensor::format_type_line(line) << "\n";
    if (config.dump_callgraph)
        for (const auto& e : report.callgraph["edges"])
            out << e["caller"].get<std::string>() << "@" << e["site"].get<int>() << " -> "
                << e["callee"].get<std::string>() << "\n";
    for (const auto& d : report.diagnostics) out << format_diagnostic(d) << "\n";
}

nlohmann::json render_json(const Report& report, const RunConfig& config) {
    nlohmann::json j;
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& d : report.diagnostics)
        j["diagnostics"].push_back({{"code", d.code},
                                    {"severity", to_string(d.severity)},
                                    {"message", d.message},
                                    {"file", d.span.file},
                                    {"line", d.span.line_start},
                                    {"col", d.span.col_start}});
    if (config.dump_types) {
        j["types"] = nlohmann::json::array();
        for (const auto& line : report.types) {
            nlohmann::json types = nlohmann::json::array();
            for (const auto& t : line.types) types.push_back(types::to_string(t));
            j["types"].push_back({{"file", line.file}, {"line", line.line}, {"types", types}});
        }
    }
    if (config.dump_callgraph) j["callgraph"] = report.callgraph;
    j["summary"] = {{"errors", report.summary.errors}, {"warnings", report.summary.warnings}};
    return j;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Static tensor shape checker for Python TensorFlow programs", "tensorlint"};
    RunConfig config;
    std::string format = "text";
    std::string hw_order = "strict";
    std::string numeric;
    std::string annotations;

    app.add_option("files", config.files, "Python source files")->required();
    app.add_option("--model", config.models, "Model file or name (repeatable)");
    app.add_option("--annotations", annotations, "Input declaration sidecar (JSON)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--fail-on-error", config.fail_on_error, "Exit 1 on warnings as well as errors");
    app.add_flag("--dump-types", config.dump_types, "Print inferred types per source line");
    app.add_flag("--dump-callgraph", config.dump_callgraph, "Print call graph edges");
    app.add_option("--hw-order", hw_order, "Height/width dimension order check")
        ->check(CLI::IsMember({"strict", "loose"}));
    app.add_option("--numeric-labels", numeric, "Comma-separated element labels accepted as numeric");
    app.add_option("--widen-cap", config.widen_cap, "Maximum types per estimate before widening")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "tensorlint: " << e.what() << "\n";
        return 2;
    }

    config.format = format == "json" ? Format::Json : Format::Text;
    config.strict_hw_order = hw_order == "strict";
    if (!annotations.empty()) config.annotations = annotations;
    if (!numeric.empty()) config.numeric_labels = split(numeric, ',');

    Report report = run(config);
    if (report.exit_code == 2) {
        err << "tensorlint: " << report.failure << "\n";
        return 2;
    }
    if (config.format == Format::Json)
        out << render_json(report, config).dump(2) << "\n";
    else
        render_text(report, config, out);
    return report.exit_code;
}

}  // namespace tensorlint::driver
