/*
 * Copyright 2026 The apeval Authors
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

#include "apeval/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "apeval/csv.hpp"
#include "apeval/errors.hpp"
#include "apeval/stages.hpp"

namespace apeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<fs::path> try_latest(const fs::path& output_dir, const std::string& stage) {
    try {
        return latest_run_dir(output_dir, stage);
    } catch (const MissingStageOutput&) {
        return std::nullopt;
    }
}

std::optional<double> parse_cell(const std::string& field) {
    if (field.empty()) return std::nullopt;
    return std::stod(field);
}

/// Cells formatted with **best** and _second-best_ markers; ties share the
/// marker. Absent values render empty.
std::vector<std::string> mark_column(const std::vector<std::optional<double>>& values,
                                     bool higher_better) {
    std::set<double> distinct;
    for (const auto& v : values) {
        if (v) distinct.insert(*v);
    }
    std::optional<double> best;
    std::optional<double> second;
    if (!distinct.empty()) {
        best = higher_better ? *distinct.rbegin() : *distinct.begin();
        if (distinct.size() > 1) {
            second = higher_better ? *std::next(distinct.rbegin()) : *std::next(distinct.begin());
        }
    }
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (const auto& v : values) {
        if (!v) {
            cells.emplace_back();
        } else if (best && *v == *best) {
            cells.push_back("**" + format_double(*v) + "**");
        } else if (second && *v == *second) {
            cells.push_back("_" + format_double(*v) + "_");
        } else {
            cells.push_back(format_double(*v));
        }
    }
    return cells;
}

std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
    std::string out = "|";
    for (const std::string& h : header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& row : rows) {
        out += "|";
        for (const std::string& cell : row) out += " " + cell + " |";
        out += "\n";
    }
    return out;
}

struct PairwiseRow {
    std::string direction, actor, judge, dataset;
    bool with_metadata = false;
    std::optional<double> kl, sim, acc;
    std::size_t n = 0;
};

std::vector<PairwiseRow> load_pairwise(const fs::path& path) {
    std::vector<PairwiseRow> rows;
    const auto csv = read_csv(path);
    for (std::size_t i = 1; i < csv.size(); ++i) {
        const auto& r = csv[i];
        if (r.size() < 9) continue;
        PairwiseRow row;
        row.direction = r[0];
        row.actor = r[1];
        row.judge = r[2];
        row.dataset = r[3];
        row.with_metadata = r[4] == "true";
        row.kl = parse_cell(r[5]);
        row.sim = parse_cell(r[6]);
        row.acc = parse_cell(r[7]);
        row.n = static_cast<std::size_t>(std::stoul(r[8]));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// One Tables-2/3-shaped block: per metadata setting, actor rows with KL/SIM
/// from the transform direction and ACC from the verification direction.
std::string influence_section(const std::vector<PairwiseRow>& rows, const std::string& dataset,
                              const std::string& style_dir, const std::string& acc_dir,
                              bool kl_higher, bool sim_higher, bool acc_higher) {
    std::string out;
    for (bool meta : {true, false}) {
        std::vector<std::string> actors;
        std::vector<std::optional<double>> kls, sims, accs;
        for (const PairwiseRow& row : rows) {
            if (row.dataset != dataset || row.with_metadata != meta) continue;
            if (row.direction == style_dir) {
                actors.push_back(row.actor);
                kls.push_back(row.kl);
                sims.push_back(row.sim);
            }
        }
        for (const std::string& actor : actors) {
            std::optional<double> acc;
            for (const PairwiseRow& row : rows) {
                if (row.dataset == dataset && row.with_metadata == meta &&
                    row.direction == acc_dir && row.actor == actor) {
                    acc = row.acc;
                }
            }
            accs.push_back(acc);
        }
        if (actors.empty()) continue;

        const auto kl_cells = mark_column(kls, kl_higher);
        const auto sim_cells = mark_column(sims, sim_higher);
        const auto acc_cells = mark_column(accs, acc_higher);
        std::vector<std::vector<std::string>> table_rows;
        for (std::size_t i = 0; i < actors.size(); ++i) {
            table_rows.push_back({actors[i], kl_cells[i], sim_cells[i], acc_cells[i]});
        }
        out += std::string("\n*") + (meta ? "with metadata" : "without metadata") + "*\n\n";
        out += markdown_table({"Model", std::string("KL (") + (kl_higher ? "↑" : "↓") + ")",
                               std::string("SIM (") + (sim_higher ? "↑" : "↓") + ")",
                               std::string("ACC (") + (acc_higher ? "↑" : "↓") + ")"},
                              table_rows);
    }
    return out;
}

}  // namespace

std::pair<std::string, json> render_report(const ExperimentConfig& config) {
    const fs::path out_dir = config.output_dir;
    const auto isolate_dir = try_latest(out_dir, "isolate");
    const auto pairwise_dir = try_latest(out_dir, "pairwise");
    const auto cycle_dir = try_latest(out_dir, "cycle");
    const auto topics_dir = try_latest(out_dir, "topics");
    if (!isolate_dir && !pairwise_dir && !cycle_dir && !topics_dir) {
        throw MissingStageOutput("isolate|pairwise|cycle|topics");
    }

    std::string md = "# apeval report\n";
    json summary;

    // -- judges + isolation -------------------------------------------------
    if (isolate_dir) {
        std::ifstream jin(*isolate_dir / "judges.json");
        if (jin) {
            const json judges = json::parse(jin);
            summary["judges"] = judges;
            md += "\n## Judges\n\n";
            md += "- AO judge: " + judges.at("ao").get<std::string>() + "\n";
            md += "- AM judge: " + judges.at("am").get<std::string>() + "\n";
            md += "- AV judge: " + judges.at("av").get<std::string>() + "\n";
            md += "- basis: " + judges.at("basis").get<std::string>() + "\n";
        }

        const auto csv = read_csv(*isolate_dir / "isolation.csv");
        struct Iso {
            std::optional<double> ao_ppl, ao_sim, am_ppl, am_sim, av_acc;
        };
        std::vector<std::string> providers;
        std::map<std::string, Iso> by_provider;
        json iso_rows = json::array();
        for (std::size_t i = 1; i < csv.size(); ++i) {
            const auto& r = csv[i];
            if (r.size() < 6) continue;
            if (by_provider.find(r[0]) == by_provider.end()) providers.push_back(r[0]);
            Iso& iso = by_provider[r[0]];
            if (r[1] == "AO") {
                iso.ao_ppl = parse_cell(r[2]);
                iso.ao_sim = parse_cell(r[3]);
            } else if (r[1] == "AM") {
                iso.am_ppl = parse_cell(r[2]);
                iso.am_sim = parse_cell(r[3]);
            } else if (r[1] == "AV") {
                iso.av_acc = parse_cell(r[4]);
            }
            iso_rows.push_back({{"provider", r[0]},
                                {"task", r[1]},
                                {"ppl_norm", r[2]},
                                {"sim", r[3]},
                                {"accuracy", r[4]},
                                {"n", r[5]}});
        }
        summary["isolation"] = iso_rows;

        std::vector<std::optional<double>> ao_ppl, ao_sim, am_ppl, am_sim, av_acc;
        for (const std::string& p : providers) {
            ao_ppl.push_back(by_provider[p].ao_ppl);
            ao_sim.push_back(by_provider[p].ao_sim);
            am_ppl.push_back(by_provider[p].am_ppl);
            am_sim.push_back(by_provider[p].am_sim);
            av_acc.push_back(by_provider[p].av_acc);
        }
        const auto c1 = mark_column(ao_ppl, true);
        const auto c2 = mark_column(ao_sim, false);
        const auto c3 = mark_column(am_ppl, false);
        const auto c4 = mark_column(am_sim, true);
        const auto c5 = mark_column(av_acc, true);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < providers.size(); ++i) {
            rows.push_back({providers[i], c1[i], c2[i], c3[i], c4[i], c5[i]});
        }
        md += "\n## Isolation\n\n";
        md += markdown_table({"Model", "AO PPL (↑)", "AO SIM (↓)", "AM PPL (↓)", "AM SIM (↑)",
                              "AV Acc (↑)"},
                             rows);
    } else {
        md += "\n## Isolation\n\n_absent (isolate stage has not run)_\n";
    }

    // -- pairwise ------------------------------------------------------------
    if (pairwise_dir) {
        const auto rows = load_pairwise(*pairwise_dir / "pairwise.csv");
        json pw = json::array();
        std::vector<std::string> datasets;
        for (const PairwiseRow& row : rows) {
            if (std::find(datasets.begin(), datasets.end(), row.dataset) == datasets.end()) {
                datasets.push_back(row.dataset);
            }
            pw.push_back({{"direction", row.direction},
                          {"actor", row.actor},
                          {"judge", row.judge},
                          {"dataset", row.dataset},
                          {"with_metadata", row.with_metadata},
                          {"kl", row.kl ? json(*row.kl) : json()},
                          {"sim", row.sim ? json(*row.sim) : json()},
                          {"acc", row.acc ? json(*row.acc) : json()},
                          {"n", row.n}});
        }
        summary["pairwise"] = pw;

        for (const std::string& dataset : datasets) {
            md += "\n## Influence of obfuscation — " + dataset + "\n";
            md += influence_section(rows, dataset, "OM", "OV", true, false, false);
            md += "\n## Influence of mimicking — " + dataset + "\n";
            md += influence_section(rows, dataset, "MO", "MV", true, false, true);

            md += "\n## Influence of verification — " + dataset + "\n";
            for (bool meta : {true, false}) {
                std::vector<std::string> actors;
                std::vector<std::optional<double>> vo_kl, vo_sim, vm_kl, vm_sim;
                for (const PairwiseRow& row : rows) {
                    if (row.dataset != dataset || row.with_metadata != meta ||
                        row.direction != "VO") {
                        continue;
                    }
                    actors.push_back(row.actor);
                    vo_kl.push_back(row.kl);
                    vo_sim.push_back(row.sim);
                }
                for (const std::string& actor : actors) {
                    std::optional<double> kl, sim_v;
                    for (const PairwiseRow& row : rows) {
                        if (row.dataset == dataset && row.with_metadata == meta &&
                            row.direction == "VM" && row.actor == actor) {
                            kl = row.kl;
                            sim_v = row.sim;
                        }
                    }
                    vm_kl.push_back(kl);
                    vm_sim.push_back(sim_v);
                }
                if (actors.empty()) continue;
                const auto c1 = mark_column(vo_kl, false);
                const auto c2 = mark_column(vo_sim, true);
                const auto c3 = mark_column(vm_kl, false);
                const auto c4 = mark_column(vm_sim, true);
                std::vector<std::vector<std::string>> table_rows;
                for (std::size_t i = 0; i < actors.size(); ++i) {
                    table_rows.push_back({actors[i], c1[i], c2[i], c3[i], c4[i]});
                }
                md += std::string("\n*") + (meta ? "with metadata" : "without metadata") + "*\n\n";
                md += markdown_table(
                    {"Model", "VO KL (↓)", "VO SIM (↑)", "VM KL (↓)", "VM SIM (↑)"}, table_rows);
            }
        }

        const fs::path pool_path = *pairwise_dir / "verification_pool.csv";
        if (fs::exists(pool_path)) {
            const auto pool = read_csv(pool_path);
            json pool_rows = json::array();
            std::vector<std::vector<std::string>> table_rows;
            for (std::size_t i = 1; i < pool.size(); ++i) {
                const auto& r = pool[i];
                if (r.size() < 9) continue;
                table_rows.push_back({r[0], r[1], r[2], r[7], r[8]});
                pool_rows.push_back({{"verifier", r[0]},
                                     {"dataset", r[1]},
                                     {"with_metadata", r[2]},
                                     {"tp", r[3]},
                                     {"fp", r[4]},
                                     {"tn", r[5]},
                                     {"fn", r[6]},
                                     {"precision", r[7]},
                                     {"recall", r[8]}});
            }
            summary["verification_pool"] = pool_rows;
            md += "\n## Verification precision and recall\n\n";
            md += markdown_table({"Model", "Dataset", "Metadata", "Precision", "Recall"},
                                 table_rows);
        }
    } else {
        md += "\n## Pairwise interdependency\n\n_absent (pairwise stage has not run)_\n";
    }

    // -- cycles ----------------------------------------------------------------
    if (cycle_dir) {
        std::ifstream sin(*cycle_dir / "series.json");
        if (sin) {
            const json series = json::parse(sin);
            summary["cycles"] = series;
            md += "\n## Iterative cycles\n";
            for (const json& block : series.at("series")) {
                md += "\n*" + block.at("dataset").get<std::string>() + ", " +
                      (block.at("with_metadata").get<bool>() ? "with metadata"
                                                             : "without metadata") +
                      "*\n\n";
                std::vector<std::string> header{"Metric"};
                std::vector<std::string> acc_row{"ACC"};
                std::vector<std::string> kl_row{"KL"};
                std::vector<std::string> sim_row{"SIM"};
                std::vector<std::string> hl_row{"Human-likeness"};
                bool any_hl = false;
                for (const json& point : block.at("points")) {
                    const auto order = point.at("step_order").get<std::size_t>();
                    std::string label = point.at("step_kind").get<std::string>();
                    if (order > 0) label += std::to_string((order + 1) / 2);
                    header.push_back(label == "original" ? "Original" : label);
                    acc_row.push_back(format_double(point.at("acc").get<double>()));
                    kl_row.push_back(format_double(point.at("kl").get<double>()));
                    sim_row.push_back(format_double(point.at("sim").get<double>()));
                    if (point.contains("human_likeness")) {
                        hl_row.push_back(format_double(point.at("human_likeness").get<double>()));
                        any_hl = true;
                    } else {
                        hl_row.emplace_back();
                    }
                }
                std::vector<std::vector<std::string>> rows{acc_row, kl_row, sim_row};
                if (any_hl) rows.push_back(hl_row);
                md += markdown_table(header, rows);
            }
        }
    } else {
        md += "\n## Iterative cycles\n\n_absent (cycle stage has not run)_\n";
    }

    // -- topics ------------------------------------------------------------------
    if (topics_dir) {
        const fs::path drift_path = *topics_dir / "drift.csv";
        if (fs::exists(drift_path)) {
            const auto drift = read_csv(drift_path);
            json drift_rows = json::array();
            std::vector<std::vector<std::string>> table_rows;
            for (std::size_t i = 1; i < drift.size(); ++i) {
                const auto& r = drift[i];
                if (r.size() < 5) continue;
                table_rows.push_back({r[0], r[1], r[2], r[3], r[4]});
                drift_rows.push_back({{"dataset", r[0]},
                                      {"round", r[1]},
                                      {"step", r[2]},
                                      {"drift", r[3]},
                                      {"baseline", r[4]}});
            }
            summary["drift"] = drift_rows;
            md += "\n## Topic drift\n\n";
            md += markdown_table({"Dataset", "Round", "Step", "Drift", "Baseline"}, table_rows);
            md += "\nPer-round top-word tables are in the topics stage output (topics.csv).\n";
        }
    } else {
        md += "\n## Topic drift\n\n_absent (topics stage has not run)_\n";
    }

    return {md, summary};
}

}  // namespace apeval
