// End-to-end pipeline behind the command-line tool.
#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tensorlint/analysis.hpp"
#include "tensorlint/diagnostics.hpp"
#include "tensorlint/tensor_analysis.hpp"

namespace tensorlint::driver {

enum class Format { Text, Json };

struct RunConfig {
    std::vector<std::string> files;
    /// Model files or names looked up on the search path. Empty selects the
    /// bundled tensorflow model.
    std::vector<std::string> models;
    std::optional<std::string> annotations;
    Format format = Format::Text;
    bool fail_on_error = false;
    bool dump_types = false;
    bool dump_callgraph = false;
    bool strict_hw_order = true;
    std::optional<std::vector<std::string>> numeric_labels;
    std::size_t widen_cap = 16;
};

struct Summary {
    int errors = 0;
    int warnings = 0;
};

struct Report {
    std::vector<Diagnostic> diagnostics;
    std::vector<tensor::TypeLine> types;
    nlohmann::json callgraph;
    std::vector<tensor::SiteReport> sites;
    Summary summary;
    int exit_code = 0;
    /// Set when the run stopped on a usage or input error (exit code 2).
    std::string failure;
    /// Points-to result, kept for callers that inspect the call graph.
    std::optional<analysis::Result> analysis;
};

/// Directories searched for model names: TENSORLINT_MODEL_DIR entries
/// (colon separated) first, then the bundled model directory.
std::vector<std::string> model_search_path();

/// Path of a model given as a file or as a name on the search path.
std::optional<std::string> resolve_model(const std::string& spec);

Report run(const RunConfig& config);

int exit_code_for(const Summary& summary, bool fail_on_error);

void render_text(const Report& report, const RunConfig& config, std::ostream& out);
nlohmann::json render_json(const Report& report, const RunConfig& config);

/// Parses arguments, runs and prints. Returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tensorlint::driver
