// Copyright 2026 The ptrlab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ptrlab/circuits.hpp"

// Scenario runner: parses a JSON configuration, executes a named experiment
// against the library, and emits a verification report. Each report entry
// carries the equation/table/figure anchor it checks, the expected and
// observed values, the tolerance, and a pass flag.
//
// JSON reports are byte-deterministic per (scenario, d, seed); wall time is
// shown in the human-readable table output only.

namespace ptrlab {

using Json = nlohmann::ordered_json;

enum class Scenario {
    table2_suite,
    pipeline,
    nondestructive_suite,
    w_state,
    basis_sweep,
    coherence_sweep,
    which_path,
    appendix_check,
    uniqueness,
};

enum class GammaKind { ones, identity, custom };

struct ScenarioConfig {
    Scenario scenario = Scenario::table2_suite;
    int d = 3;
    std::uint64_t seed = 0;
    std::int64_t shots = 10000;
    GammaKind gamma_kind = GammaKind::ones;
    Matrix gamma_custom;  // only used when gamma_kind == custom
    bool counter_dim_plus_one = false;
    std::string output_path;

    int counter_dim() const { return counter_dim_plus_one ? d + 1 : d; }
    CoherenceGram gamma() const;
};

struct ReportEntry {
    std::string name;
    std::string paper_anchor;
    Json expected;
    Json observed;
    double tolerance = 0.0;
    bool pass = false;
    bool skipped = false;
};

struct Report {
    std::string scenario_name;
    int d = 0;
    std::uint64_t seed = 0;
    std::int64_t shots = 0;
    int counter_dim = 0;
    std::string gamma_desc;
    std::vector<ReportEntry> entries;
    Json histograms = Json::object();  // raw counts, never frequencies
    bool aggregate_pass = false;
    double wall_time_ms = 0.0;  // excluded from the JSON report
};

const std::vector<std::string>& scenario_names();
Scenario scenario_from_name(const std::string& name);
const std::string& scenario_name(Scenario s);

// Anchors a report entry may cite; fixed vocabulary, no free-form strings.
const std::vector<std::string>& allowed_anchors();

// Parses and validates a UTF-8 JSON config; throws std::invalid_argument
// with a field path on schema violations.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_json(const Json& doc);

// Deterministic per (scenario, d, seed). Module errors become failed
// entries, not crashes.
Report run_scenario(const ScenarioConfig& config);

std::string emit_report_json(const Report& report);
std::string emit_report_table(const Report& report);

}  // namespace ptrlab
