// triarch command-line front end. Subcommands mirror the library modules:
//   generate   synthetic tri-polar network -> node/edge files + manifest
//   ingest     validate a snapshot manifest, emit stance summary
//   diff       attrition + mixing-matrix comparison of two snapshots
//   centrality betweenness scores
//   layout     force-directed layout (+ optional SVG)
//   glocality  topic mixes, toponyms, scale network, local/global, chi-square
//   simulate   softening ensemble
//   rerun      re-execute a recorded run manifest
//
// Every run writes a run_manifest.txt (subcommand, resolved inputs, all
// parameters after defaulting, seed, version, output dir) next to its
// outputs. Outputs are staged as .tmp files and renamed only after the whole
// command succeeds, so failures leave no partial outputs.
// Exit codes: 0 ok, 2 validation/arguments, 3 I/O, 4 numerical blowup.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "triarch/attrition.hpp"
#include "triarch/centrality.hpp"
#include "triarch/glocality.hpp"
#include "triarch/ingest.hpp"
#include "triarch/layout.hpp"
#include "triarch/softening.hpp"
#include "triarch/svg.hpp"
#include "triarch/synth.hpp"
#include "triarch/version.hpp"

namespace fs = std::filesystem;
using namespace triarch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitBlowup = 4;

// ---------------------------------------------------------------------------
// Output staging: files accumulate under temp names, one rename pass at the
// end. A failure anywhere leaves the output directory without new files.
// ---------------------------------------------------------------------------

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create " + dir_.string());
    }

    ~OutputSet() {
        for (const auto& [tmp, final_] : staged_) {
            std::error_code ec;
            fs::remove(tmp, ec);
        }
    }

    std::ofstream open(const std::string& name) {
        const fs::path tmp = dir_ / (name + ".tmp");
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        staged_.emplace_back(tmp, dir_ / name);
        return out;
    }

    void commit() {
        for (const auto& [tmp, final_] : staged_) {
            std::error_code ec;
            fs::rename(tmp, final_, ec);
            if (ec) throw Error(ErrorKind::Io, "cannot finalize " + final_.string());
        }
        staged_.clear();
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::pair<fs::path, fs::path>> staged_;
};

// Ordered key-value record of one CLI invocation.
struct RunManifest {
    KvDocument doc;

    void set(const std::string& key, const std::string& value) {
        doc.entries.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

    void write(OutputSet& out) const {
        auto f = out.open("run_manifest.txt");
        save_kv(f, doc);
    }
};

RunManifest base_manifest(const std::string& subcommand, const fs::path& out_dir) {
    RunManifest m;
    m.set("subcommand", subcommand);
    m.set("version", std::string(kVersion));
    m.set("output_dir", fs::absolute(out_dir).string());
    return m;
}

std::string resolved(const fs::path& p) { return fs::absolute(p).string(); }

void print_warnings(const std::vector<ValidationWarning>& warnings) {
    for (const auto& w : warnings)
        std::cerr << "warning (row " << w.row << "): " << w.message << "\n";
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct CommonOpts {
    std::string out_dir = "out";
    unsigned threads = 0;  // 0 = TRIARCH_THREADS or hardware
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--threads", opts.threads,
                    "Worker threads (0 = TRIARCH_THREADS env or machine parallelism)")
        ->capture_default_str();
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOpts {
    CommonOpts common;
    std::string config_path;
    std::uint64_t seed = kDefaultSeed;
    std::string label;
};

GeneratorConfig read_generator_config(const std::string& path) {
    GeneratorConfig cfg;
    if (path.empty()) return cfg;
    const KvDocument doc = load_kv(path);
    for (const auto& [key, value] : doc.entries) {
        auto num = [&]() {
            auto v = parse_double(value);
            if (!v) throw Error(ErrorKind::BadArgs, "bad number for " + key + ": " + value);
            return *v;
        };
        if (key == "anti_nodes") cfg.stance_nodes[0] = static_cast<std::uint32_t>(num());
        else if (key == "pro_nodes") cfg.stance_nodes[1] = static_cast<std::uint32_t>(num());
        else if (key == "neutral_nodes") cfg.stance_nodes[2] = static_cast<std::uint32_t>(num());
        else if (key == "anti_fans") cfg.fan_totals[0] = static_cast<std::uint64_t>(num());
        else if (key == "pro_fans") cfg.fan_totals[1] = static_cast<std::uint64_t>(num());
        else if (key == "neutral_fans") cfg.fan_totals[2] = static_cast<std::uint64_t>(num());
        else if (key == "coordinate_fraction") cfg.coordinate_fraction = num();
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
        else if (key == "label") cfg.label = value;
        else if (key == "subcategory_weights" || key == "toponym_weights") {
            std::vector<double> weights;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto w = parse_double(detail::trim(item));
                if (!w) throw Error(ErrorKind::BadArgs, "bad weight list for " + key);
                weights.push_back(*w);
            }
            if (key == "subcategory_weights") {
                if (weights.size() != kSubcategoryCount)
                    throw Error(ErrorKind::BadArgs,
                                "subcategory_weights needs 12 comma-separated values");
                std::copy(weights.begin(), weights.end(), cfg.subcategory_weights.begin());
            } else {
                if (weights.size() != 9)
                    throw Error(ErrorKind::BadArgs,
                                "toponym_weights needs 9 values (none + 8 scale families)");
                std::copy(weights.begin(), weights.end(), cfg.toponym_weights.begin());
            }
        }
        else if (key.rfind("p_", 0) == 0 && key.size() == 4) {
            auto idx = [&](char c) -> int {
                if (c == 'a') return 0;
                if (c == 'p') return 1;
                if (c == 'n') return 2;
                throw Error(ErrorKind::BadArgs, "bad block key " + key);
            };
            cfg.block_prob[idx(key[2])][idx(key[3])] = num();
        } else {
            std::cerr << "warning: unknown generator key '" << key << "' ignored\n";
        }
    }
    return cfg;
}

int cmd_generate(const GenerateOpts& opts) {
    GeneratorConfig cfg = read_generator_config(opts.config_path);
    if (opts.seed != kDefaultSeed || cfg.seed == 0) cfg.seed = opts.seed;
    if (!opts.label.empty()) cfg.label = opts.label;

    Snapshot snapshot = generate(cfg);
    OutputSet out(opts.common.out_dir);
    {
        auto nodes = out.open("snapshot_nodes.csv");
        save_nodes(nodes, snapshot.nodes());
        auto edges = out.open("snapshot_edges.csv");
        save_edges(edges, snapshot);
        auto manifest = out.open("snapshot.manifest");
        KvDocument doc;
        doc.entries = {{"label", snapshot.label()},
                       {"nodes", "snapshot_nodes.csv"},
                       {"edges", "snapshot_edges.csv"}};
        save_kv(manifest, doc);
    }

    RunManifest rm = base_manifest("generate", out.dir());
    if (!opts.config_path.empty()) rm.set("config", resolved(opts.config_path));
    rm.set("seed", cfg.seed);
    rm.set("label", snapshot.label());
    rm.set("anti_nodes", std::uint64_t{cfg.stance_nodes[0]});
    rm.set("pro_nodes", std::uint64_t{cfg.stance_nodes[1]});
    rm.set("neutral_nodes", std::uint64_t{cfg.stance_nodes[2]});
    rm.write(out);
    out.commit();

    std::cout << "generated " << snapshot.node_count() << " nodes, "
              << snapshot.edge_count() << " edges -> " << out.dir().string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestOpts {
    CommonOpts common;
    std::string manifest;
};

int cmd_ingest(const IngestOpts& opts) {
    LoadedSnapshot loaded = load_snapshot(fs::path(opts.manifest));
    print_warnings(loaded.warnings);
    const auto counts = stance_counts(loaded.snapshot);

    OutputSet out(opts.common.out_dir);
    {
        auto f = out.open("stance_summary.csv");
        f << "stance,node_count,fan_total\n";
        for (Stance s : kAllStances) {
            const auto& t = counts[static_cast<std::size_t>(s)];
            f << to_string(s) << "," << t.node_count << "," << t.fan_total << "\n";
        }
        f << "total," << loaded.snapshot.node_count() << ","
          << counts[0].fan_total + counts[1].fan_total + counts[2].fan_total << "\n";
    }
    RunManifest rm = base_manifest("ingest", out.dir());
    rm.set("manifest", resolved(opts.manifest));
    rm.set("label", loaded.snapshot.label());
    rm.set("warnings", std::uint64_t{loaded.warnings.size()});
    rm.write(out);
    out.commit();

    std::cout << "ingested '" << loaded.snapshot.label() << "': "
              << loaded.snapshot.node_count() << " nodes, " << loaded.snapshot.edge_count()
              << " edges, " << loaded.warnings.size() << " warnings\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// diff
// ---------------------------------------------------------------------------

struct DiffOpts {
    CommonOpts common;
    std::string before;
    std::string after;
    std::string attribution = "incident";
    std::string activity_window;  // "YYYY-MM:YYYY-MM"; empty = span of the posts
    std::uint32_t first_page_depth = 10;
};

int cmd_diff(const DiffOpts& opts) {
    auto before = load_snapshot(fs::path(opts.before));
    auto after = load_snapshot(fs::path(opts.after));
    print_warnings(before.warnings);
    print_warnings(after.warnings);

    EdgeAttribution attribution;
    if (opts.attribution == "incident") attribution = EdgeAttribution::Incident;
    else if (opts.attribution == "source") attribution = EdgeAttribution::SourceOnly;
    else throw Error(ErrorKind::BadArgs, "--attribution must be incident or source");

    AttritionReport rep = diff_attrition(before.snapshot, after.snapshot, attribution);
    MixingMatrix mix_before = mixing_matrix(before.snapshot);
    MixingMatrix mix_after = mixing_matrix(after.snapshot);

    OutputSet out(opts.common.out_dir);
    {
        auto f = out.open("attrition_report.csv");
        f << "stance,node_total,node_removed,node_pct,edge_total,edge_removed,edge_pct\n";
        for (Stance s : kAllStances) {
            const auto& st = rep.per_stance[static_cast<std::size_t>(s)];
            f << to_string(s) << "," << st.node_total << "," << st.node_removed << ","
              << format_fixed(st.node_pct, 1) << "," << st.edge_total << ","
              << st.edge_removed << "," << format_fixed(st.edge_pct, 1) << "\n";
        }
        f << "overall," << rep.node_total << "," << rep.node_removed << ","
          << format_fixed(rep.overall_node_pct, 1) << "," << rep.edge_total << ","
          << rep.edge_removed << "," << format_fixed(rep.overall_edge_pct, 1) << "\n";
    }
    {
        auto f = out.open("mixing_matrices.csv");
        f << "snapshot,source_stance,target_stance,fraction\n";
        auto dump = [&](const char* tag, const MixingMatrix& m) {
            for (Stance a : kAllStances)
                for (Stance b : kAllStances)
                    f << tag << "," << to_string(a) << "," << to_string(b) << ","
                      << format_double(
                             m.fraction[static_cast<int>(a)][static_cast<int>(b)])
                      << "\n";
        };
        dump("before", mix_before);
        dump("after", mix_after);
        if (mix_before.defined && mix_after.defined)
            f << "distance,,," << format_double(matrix_distance(mix_before, mix_after))
              << "\n";
    }

    // Posting-activity recency of the live (after) snapshot, when its
    // manifest names a posts file.
    if (!after.posts.empty()) {
        YearMonth window_begin, window_end;
        if (opts.activity_window.empty()) {
            window_begin = window_end = year_month_of(after.posts[0].timestamp_utc);
            for (const PostRecord& p : after.posts) {
                const YearMonth ym = year_month_of(p.timestamp_utc);
                if (ym < window_begin) window_begin = ym;
                if (window_end < ym) window_end = ym;
            }
        } else {
            const auto colon = opts.activity_window.find(':');
            auto lo = colon == std::string::npos
                          ? std::nullopt
                          : parse_year_month(opts.activity_window.substr(0, colon));
            auto hi = colon == std::string::npos
                          ? std::nullopt
                          : parse_year_month(opts.activity_window.substr(colon + 1));
            if (!lo || !hi)
                throw Error(ErrorKind::BadArgs,
                            "--activity-window must be YYYY-MM:YYYY-MM");
            window_begin = *lo;
            window_end = *hi;
        }
        const ActivityHistogram hist =
            activity_histogram(after.posts, after.snapshot, window_begin, window_end,
                               opts.first_page_depth);
        auto f = out.open("activity_histogram.csv");
        f << "stance,month,count\n";
        for (Stance s : kAllStances)
            for (std::size_t m = 0; m < hist.month_count(); ++m)
                f << to_string(s) << ","
                  << to_string(add_months(window_begin, static_cast<std::int64_t>(m)))
                  << "," << hist.counts[static_cast<std::size_t>(s)][m] << "\n";
    }

    RunManifest rm = base_manifest("diff", out.dir());
    rm.set("before", resolved(opts.before));
    rm.set("after", resolved(opts.after));
    rm.set("attribution", opts.attribution);
    if (!opts.activity_window.empty()) rm.set("activity_window", opts.activity_window);
    rm.set("first_page_depth", std::uint64_t{opts.first_page_depth});
    rm.write(out);
    out.commit();

    std::cout << "attrition: nodes " << format_fixed(rep.overall_node_pct, 1) << "% edges "
              << format_fixed(rep.overall_edge_pct, 1) << "% -> " << out.dir().string()
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// centrality
// ---------------------------------------------------------------------------

struct CentralityOpts {
    CommonOpts common;
    std::string input;
    bool directed = true;
    bool normalized = false;
};

int cmd_centrality(const CentralityOpts& opts) {
    auto loaded = load_snapshot(fs::path(opts.input));
    print_warnings(loaded.warnings);
    CentralityScores scores =
        betweenness(loaded.snapshot, opts.directed, opts.normalized, opts.common.threads);

    OutputSet out(opts.common.out_dir);
    {
        auto f = out.open("centrality.csv");
        f << "id,betweenness\n";
        for (NodeIndex i = 0; i < loaded.snapshot.node_count(); ++i)
            write_csv_row(f, {loaded.snapshot.node(i).id, format_double(scores.score[i])});
    }
    RunManifest rm = base_manifest("centrality", out.dir());
    rm.set("input", resolved(opts.input));
    rm.set("directed", opts.directed ? "true" : "false");
    rm.set("normalized", opts.normalized ? "true" : "false");
    rm.set("threads", std::uint64_t{opts.common.threads});
    rm.write(out);
    out.commit();

    std::cout << "betweenness for " << loaded.snapshot.node_count() << " nodes -> "
              << out.dir().string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// layout
// ---------------------------------------------------------------------------

struct LayoutOpts {
    CommonOpts common;
    std::string input;
    std::uint64_t seed = kDefaultSeed;
    LayoutParams params;
    bool svg = false;
    bool svg_subcategories = false;
    double min_px = 4.0;
    double max_px = 40.0;
};

int cmd_layout(const LayoutOpts& opts) {
    auto loaded = load_snapshot(fs::path(opts.input));
    print_warnings(loaded.warnings);
    LayoutParams params = opts.params;
    params.threads = opts.common.threads;
    const auto positions = run_layout(loaded.snapshot, params, opts.seed);

    OutputSet out(opts.common.out_dir);
    {
        auto f = out.open("layout.csv");
        f << "id,x,y\n";
        for (NodeIndex i = 0; i < loaded.snapshot.node_count(); ++i)
            write_csv_row(f, {loaded.snapshot.node(i).id, format_double(positions[i].x),
                              format_double(positions[i].y)});
    }
    if (opts.svg) {
        CentralityScores scores =
            betweenness(loaded.snapshot, true, false, opts.common.threads);
        const auto radii = size_scale(scores.score, opts.min_px, opts.max_px);
        auto f = out.open("layout.svg");
        SvgOptions svg_opts;
        svg_opts.color_by_subcategory = opts.svg_subcategories;
        write_svg(f, loaded.snapshot, positions, radii, svg_opts);
    }

    RunManifest rm = base_manifest("layout", out.dir());
    rm.set("input", resolved(opts.input));
    rm.set("seed", opts.seed);
    rm.set("repulsion_k", params.repulsion_k);
    rm.set("gravity_k", params.gravity_k);
    rm.set("theta", params.theta);
    rm.set("jitter_tolerance", params.jitter_tolerance);
    rm.set("displacement_tolerance", params.displacement_tolerance);
    rm.set("max_iterations", std::uint64_t{params.max_iterations});
    rm.set("barnes_hut", params.use_barnes_hut ? "true" : "false");
    rm.set("svg", opts.svg ? "true" : "false");
    rm.set("threads", std::uint64_t{opts.common.threads});
    rm.write(out);
    out.commit();

    std::cout << "layout of " << loaded.snapshot.node_count() << " nodes -> "
              << out.dir().string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// glocality
// ---------------------------------------------------------------------------

struct GlocalityOpts {
    CommonOpts common;
    std::string input;
    std::string lexicon_path;
    std::string gazetteer_path;
};

int cmd_glocality(const GlocalityOpts& opts) {
    auto loaded = load_snapshot(fs::path(opts.input));
    print_warnings(loaded.warnings);
    const Snapshot& s = loaded.snapshot;

    const fs::path data_dir = TRIARCH_DATA_DIR;
    const fs::path lex_path =
        opts.lexicon_path.empty() ? data_dir / "lexicon_default.txt" : fs::path(opts.lexicon_path);
    const fs::path gaz_path = opts.gazetteer_path.empty() ? data_dir / "gazetteer_default.csv"
                                                          : fs::path(opts.gazetteer_path);
    const TopicLexicon lexicon = load_lexicon(lex_path);
    const Gazetteer gazetteer = load_gazetteer(gaz_path);

    // Topic side (needs posts; empty mixes when the manifest has none).
    std::map<std::string_view, std::vector<PostRecord>> posts_by_page;
    for (const PostRecord& p : loaded.posts) posts_by_page[p.page_id].push_back(p);
    std::vector<TopicMix> mixes;
    mixes.reserve(s.node_count());
    for (NodeIndex i = 0; i < s.node_count(); ++i) {
        auto it = posts_by_page.find(s.node(i).id);
        if (it == posts_by_page.end())
            mixes.push_back(topic_mix({}, lexicon));
        else
            mixes.push_back(topic_mix(it->second, lexicon));
    }
    const CrossTopicResult cross = cross_topic_edge_fraction(s, mixes);

    // Geographic side.
    std::vector<std::vector<ToponymRecord>> toponyms;
    toponyms.reserve(s.node_count());
    for (NodeIndex i = 0; i < s.node_count(); ++i)
        toponyms.push_back(extract_toponyms(s.node(i), gazetteer));
    const ScaleNetwork scale_net = build_scale_network(s, toponyms);
    const LocalGlobalPartition partition = local_global_partition(toponyms, s);

    // Chi-square: local/global membership against stance.
    std::vector<std::vector<double>> table(2, std::vector<double>(3, 0.0));
    for (NodeIndex i : partition.local_pages)
        table[0][static_cast<std::size_t>(s.node(i).stance)] += 1.0;
    for (NodeIndex i : partition.global_pages)
        table[1][static_cast<std::size_t>(s.node(i).stance)] += 1.0;
    std::optional<ChiSquareResult> chi;
    try {
        chi = chi_square_independence(table);
    } catch (const Error&) {
        // Degenerate marginals (e.g. no local pages): report is omitted.
    }

    OutputSet out(opts.common.out_dir);
    {
        auto f = out.open("topic_mix.csv");
        f << "page_id,topic,proportion\n";
        for (NodeIndex i = 0; i < s.node_count(); ++i) {
            if (mixes[i].empty) continue;
            for (std::uint32_t t = 0; t < lexicon.topic_count(); ++t)
                if (mixes[i].proportion[t] > 0.0)
                    write_csv_row(f, {s.node(i).id, lexicon.names[t],
                                      format_double(mixes[i].proportion[t])});
        }
    }
    {
        auto f = out.open("topic_summary.csv");
        f << "page_id,dominant_topic,entropy_bits,matched_posts\n";
        for (NodeIndex i = 0; i < s.node_count(); ++i) {
            if (mixes[i].empty) continue;
            write_csv_row(f, {s.node(i).id, lexicon.names[mixes[i].dominant],
                              format_double(topic_entropy(mixes[i])),
                              std::to_string(mixes[i].matched_posts)});
        }
        f << "cross_topic_fraction,," << format_double(cross.fraction) << ","
          << cross.counted_edges << "\n";
    }
    {
        auto f = out.open("toponyms.csv");
        f << "page_id,toponym,scale\n";
        for (NodeIndex i = 0; i < s.node_count(); ++i)
            for (const ToponymRecord& t : toponyms[i])
                write_csv_row(f, {s.node(i).id, t.toponym, to_string(t.scale)});
    }
    {
        auto f = out.open("scale_edges.csv");
        f << "source,target,scale_a,scale_b\n";
        for (const ScaleEdge& e : scale_net.edges)
            write_csv_row(f, {s.node(e.source).id, s.node(e.target).id,
                              to_string(e.source_scale), to_string(e.target_scale)});
    }
    {
        auto f = out.open("partition_summary.csv");
        f << "partition,pages,fan_total\n";
        f << "local," << partition.local_pages.size() << "," << partition.local_fan_total
          << "\n";
        f << "global," << partition.global_pages.size() << "," << partition.global_fan_total
          << "\n";
        f << "no_toponym," << partition.no_toponym_pages << ",\n";
    }
    if (chi) {
        auto f = out.open("chi_square.csv");
        f << "statistic,dof,p_value\n";
        f << format_double(chi->statistic) << "," << chi->dof << ","
          << format_double(chi->p_value) << "\n";
    }

    RunManifest rm = base_manifest("glocality", out.dir());
    rm.set("input", resolved(opts.input));
    rm.set("lexicon", resolved(lex_path));
    rm.set("gazetteer", resolved(gaz_path));
    rm.set("local_pages", std::uint64_t{partition.local_pages.size()});
    rm.set("global_pages", std::uint64_t{partition.global_pages.size()});
    rm.write(out);
    out.commit();

    std::cout << "glocality: " << partition.local_pages.size() << " local / "
              << partition.global_pages.size() << " global, "
              << scale_net.edges.size() << " cross-scale edges -> " << out.dir().string()
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
    CommonOpts common;
    std::string input;
    std::string config_path;
    std::uint64_t seed = kDefaultSeed;
    bool per_run = false;
    bool record_states = false;
    std::vector<std::uint32_t> snapshot_steps;
};

SofteningConfig read_softening_config(const std::string& path) {
    SofteningConfig cfg;
    if (path.empty()) return cfg;
    const KvDocument doc = load_kv(path);
    for (const auto& [key, value] : doc.entries) {
        auto num = [&]() {
            auto v = parse_double(value);
            if (!v) throw Error(ErrorKind::BadArgs, "bad number for " + key + ": " + value);
            return *v;
        };
        if (key == "circle_size") cfg.circle_size = static_cast<std::uint32_t>(num());
        else if (key == "circles_per_step")
            cfg.circles_per_step = static_cast<std::uint32_t>(num());
        else if (key == "conversion_probability") cfg.conversion_probability = num();
        else if (key == "max_steps") cfg.max_steps = static_cast<std::uint32_t>(num());
        else if (key == "run_count") cfg.run_count = static_cast<std::uint32_t>(num());
        else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(num());
        else if (key == "hours_per_step") cfg.hours_per_step = num();
        else if (key == "scenario") {
            auto s = parse_scenario(value);
            if (!s) throw Error(ErrorKind::BadArgs, "bad scenario: " + value);
            cfg.scenario = *s;
        } else if (key == "mixed_rule") {
            auto r = parse_mixed_rule(value);
            if (!r) throw Error(ErrorKind::BadArgs, "bad mixed_rule: " + value);
            cfg.mixed_rule = *r;
        } else {
            std::cerr << "warning: unknown softening key '" << key << "' ignored\n";
        }
    }
    return cfg;
}

int cmd_simulate(const SimulateOpts& opts) {
    auto loaded = load_snapshot(fs::path(opts.input));
    print_warnings(loaded.warnings);

    SofteningConfig cfg = read_softening_config(opts.config_path);
    if (opts.seed != kDefaultSeed) cfg.master_seed = opts.seed;
    cfg.record_states = opts.record_states || !opts.snapshot_steps.empty();
    cfg.threads = opts.common.threads;

    SofteningResult result = run_ensemble(loaded.snapshot, cfg);

    OutputSet out(opts.common.out_dir);
    const std::string mixed_note =
        std::string("# mixed_definition=") + to_string(cfg.mixed_rule) + "\n";
    {
        auto f = out.open("trajectory.csv");
        f << mixed_note;
        f << "step,anti_mean,anti_sd,pro_mean,pro_sd,neutral_mean\n";
        for (std::size_t t = 0; t < result.mean.size(); ++t)
            f << t << "," << format_double(result.mean[t][0]) << ","
              << format_double(result.sd[t][0]) << "," << format_double(result.mean[t][1])
              << "," << format_double(result.sd[t][1]) << ","
              << format_double(result.mean[t][2]) << "\n";
    }
    {
        auto f = out.open("milestones.csv");
        f << mixed_note;
        f << "name,mean_step,sd_step,censored_runs\n";
        auto row = [&](const char* name, const Milestone& m) {
            f << name << "," << format_double(m.mean_step) << "," << format_double(m.sd_step)
              << "," << m.censored_runs << "\n";
        };
        row("half_anti", result.half_anti);
        row("half_pro", result.half_pro);
        row("full_neutral", result.full_neutral);
    }
    if (opts.per_run) {
        auto f = out.open("runs.csv");
        f << mixed_note;
        f << "run,step,anti,pro,neutral\n";
        for (std::size_t r = 0; r < result.runs.size(); ++r)
            for (std::size_t t = 0; t < result.runs[r].counts.size(); ++t) {
                const auto& c = result.runs[r].counts[t];
                f << r << "," << t << "," << c.anti << "," << c.pro << "," << c.neutral
                  << "\n";
            }
    }
    if (!opts.snapshot_steps.empty()) {
        auto snaps = snapshot_states(loaded.snapshot, result, opts.snapshot_steps);
        auto f = out.open("state_snapshots.csv");
        f << mixed_note;
        f << "step,id,stance\n";
        for (std::size_t k = 0; k < snaps.size(); ++k)
            for (const PageNode& n : snaps[k].nodes())
                f << opts.snapshot_steps[k] << "," << csv_escape(n.id) << ","
                  << to_string(n.stance) << "\n";
    }

    RunManifest rm = base_manifest("simulate", out.dir());
    rm.set("input", resolved(opts.input));
    if (!opts.config_path.empty()) rm.set("config", resolved(opts.config_path));
    rm.set("master_seed", cfg.master_seed);
    rm.set("circle_size", std::uint64_t{cfg.circle_size});
    rm.set("circles_per_step",
           std::uint64_t{cfg.effective_circles(loaded.snapshot.node_count())});
    rm.set("conversion_probability", cfg.conversion_probability);
    rm.set("scenario", to_string(cfg.scenario));
    rm.set("mixed_rule", to_string(cfg.mixed_rule));
    rm.set("max_steps", std::uint64_t{cfg.max_steps});
    rm.set("run_count", std::uint64_t{cfg.run_count});
    rm.set("hours_per_step", cfg.hours_per_step);
    rm.set("per_run", opts.per_run ? "true" : "false");
    rm.set("record_states", cfg.record_states ? "true" : "false");
    if (!opts.snapshot_steps.empty()) {
        std::string steps;
        for (std::uint32_t s : opts.snapshot_steps) {
            if (!steps.empty()) steps += ',';
            steps += std::to_string(s);
        }
        rm.set("snapshot_steps", steps);
    }
    rm.set("threads", std::uint64_t{opts.common.threads});
    rm.write(out);
    out.commit();

    std::cout << "softening: half-anti at step " << format_double(result.half_anti.mean_step)
              << " (censored " << result.half_anti.censored_runs << "/" << cfg.run_count
              << ") -> " << out.dir().string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// rerun: re-execute a recorded run manifest
// ---------------------------------------------------------------------------

int dispatch(const std::string& subcommand, const KvDocument& doc, const std::string& out_dir,
             unsigned threads);

struct RerunOpts {
    CommonOpts common;
    std::string manifest;
};

int cmd_rerun(const RerunOpts& opts) {
    const KvDocument doc = load_kv(opts.manifest);
    const std::string sub = doc.require("subcommand");
    return dispatch(sub, doc, opts.common.out_dir, opts.common.threads);
}

int dispatch(const std::string& subcommand, const KvDocument& doc, const std::string& out_dir,
             unsigned threads) {
    auto u64 = [&](const char* key, std::uint64_t fallback) {
        const std::string* v = doc.find(key);
        if (!v) return fallback;
        auto parsed = parse_u64(*v);
        if (!parsed) throw Error(ErrorKind::BadArgs, std::string("bad manifest value ") + key);
        return *parsed;
    };
    auto dbl = [&](const char* key, double fallback) {
        const std::string* v = doc.find(key);
        if (!v) return fallback;
        auto parsed = parse_double(*v);
        if (!parsed) throw Error(ErrorKind::BadArgs, std::string("bad manifest value ") + key);
        return *parsed;
    };
    auto flag = [&](const char* key, bool fallback) {
        const std::string* v = doc.find(key);
        return v ? *v == "true" : fallback;
    };

    if (subcommand == "generate") {
        GenerateOpts o;
        o.common.out_dir = out_dir;
        if (const std::string* c = doc.find("config")) o.config_path = *c;
        o.seed = u64("seed", kDefaultSeed);
        if (const std::string* l = doc.find("label")) o.label = *l;
        return cmd_generate(o);
    }
    if (subcommand == "ingest") {
        IngestOpts o;
        o.common.out_dir = out_dir;
        o.manifest = doc.require("manifest");
        return cmd_ingest(o);
    }
    if (subcommand == "diff") {
        DiffOpts o;
        o.common.out_dir = out_dir;
        o.before = doc.require("before");
        o.after = doc.require("after");
        if (const std::string* a = doc.find("attribution")) o.attribution = *a;
        if (const std::string* w = doc.find("activity_window")) o.activity_window = *w;
        o.first_page_depth = static_cast<std::uint32_t>(u64("first_page_depth", 10));
        return cmd_diff(o);
    }
    if (subcommand == "centrality") {
        CentralityOpts o;
        o.common.out_dir = out_dir;
        o.common.threads = threads;
        o.input = doc.require("input");
        o.directed = flag("directed", true);
        o.normalized = flag("normalized", false);
        return cmd_centrality(o);
    }
    if (subcommand == "layout") {
        LayoutOpts o;
        o.common.out_dir = out_dir;
        o.common.threads = threads;
        o.input = doc.require("input");
        o.seed = u64("seed", kDefaultSeed);
        o.params.repulsion_k = dbl("repulsion_k", o.params.repulsion_k);
        o.params.gravity_k = dbl("gravity_k", o.params.gravity_k);
        o.params.theta = dbl("theta", o.params.theta);
        o.params.jitter_tolerance = dbl("jitter_tolerance", o.params.jitter_tolerance);
        o.params.displacement_tolerance =
            dbl("displacement_tolerance", o.params.displacement_tolerance);
        o.params.max_iterations =
            static_cast<std::uint32_t>(u64("max_iterations", o.params.max_iterations));
        o.params.use_barnes_hut = flag("barnes_hut", true);
        o.svg = flag("svg", false);
        return cmd_layout(o);
    }
    if (subcommand == "glocality") {
        GlocalityOpts o;
        o.common.out_dir = out_dir;
        o.input = doc.require("input");
        if (const std::string* l = doc.find("lexicon")) o.lexicon_path = *l;
        if (const std::string* g = doc.find("gazetteer")) o.gazetteer_path = *g;
        return cmd_glocality(o);
    }
    if (subcommand == "simulate") {
        SimulateOpts o;
        o.common.out_dir = out_dir;
        o.common.threads = threads;
        o.input = doc.require("input");
        if (const std::string* c = doc.find("config")) o.config_path = *c;
        o.seed = u64("master_seed", kDefaultSeed);
        o.per_run = flag("per_run", false);
        o.record_states = flag("record_states", false);
        if (const std::string* steps = doc.find("snapshot_steps")) {
            std::stringstream ss(*steps);
            std::string item;
            while (std::getline(ss, item, ','))
                o.snapshot_steps.push_back(
                    static_cast<std::uint32_t>(std::strtoul(item.c_str(), nullptr, 10)));
        }
        return cmd_simulate(o);
    }
    throw Error(ErrorKind::BadArgs, "unknown subcommand in manifest: " + subcommand);
}

// ---------------------------------------------------------------------------

int error_exit(const Error& e) {
    nlohmann::json report{{"error", to_string(e.kind())}, {"detail", e.what()}};
    if (e.row() >= 0) report["row"] = e.row();
    std::cerr << report.dump() << "\n";
    switch (e.kind()) {
        case ErrorKind::Io:
            return kExitIo;
        case ErrorKind::NumericalBlowup:
            return kExitBlowup;
        default:
            return kExitValidation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tri-polar page-network analytics and softening simulation"};
    app.require_subcommand(1);

    GenerateOpts gen;
    auto* cmd_gen = app.add_subcommand("generate", "Generate a synthetic tri-polar network");
    add_common(cmd_gen, gen.common);
    cmd_gen->add_option("--config", gen.config_path, "Generator key-value config file");
    cmd_gen->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    cmd_gen->add_option("--label", gen.label, "Snapshot label");

    IngestOpts ing;
    auto* cmd_ing = app.add_subcommand("ingest", "Validate and summarize a snapshot");
    add_common(cmd_ing, ing.common);
    cmd_ing->add_option("--manifest", ing.manifest, "Snapshot manifest")->required();

    DiffOpts diff;
    auto* cmd_df = app.add_subcommand("diff", "Attrition between two snapshots");
    add_common(cmd_df, diff.common);
    cmd_df->add_option("--before", diff.before, "Earlier snapshot manifest")->required();
    cmd_df->add_option("--after", diff.after, "Later snapshot manifest")->required();
    cmd_df->add_option("--attribution", diff.attribution,
                       "Edge attribution: incident or source")
        ->capture_default_str();
    cmd_df->add_option("--activity-window", diff.activity_window,
                       "Histogram window YYYY-MM:YYYY-MM (default: span of the posts)");
    cmd_df->add_option("--first-page-depth", diff.first_page_depth,
                       "Most recent posts per page counted in the histogram")
        ->capture_default_str();

    CentralityOpts cen;
    auto* cmd_cen = app.add_subcommand("centrality", "Betweenness centrality");
    add_common(cmd_cen, cen.common);
    cmd_cen->add_option("--input", cen.input, "Snapshot manifest")->required();
    cmd_cen->add_flag("--directed,!--undirected", cen.directed,
                      "Directed shortest paths (default true)")
        ->capture_default_str();
    cmd_cen->add_flag("--normalized", cen.normalized, "Divide by the pair count")
        ->capture_default_str();

    LayoutOpts lay;
    auto* cmd_lay = app.add_subcommand("layout", "Force-directed layout");
    add_common(cmd_lay, lay.common);
    cmd_lay->add_option("--input", lay.input, "Snapshot manifest")->required();
    cmd_lay->add_option("--seed", lay.seed, "Layout seed")->capture_default_str();
    cmd_lay->add_option("--repulsion", lay.params.repulsion_k, "Repulsion scaling k_r")
        ->capture_default_str();
    cmd_lay->add_option("--gravity", lay.params.gravity_k, "Gravity k_g")
        ->capture_default_str();
    cmd_lay->add_option("--theta", lay.params.theta, "Barnes-Hut opening angle (0 = exact)")
        ->capture_default_str();
    cmd_lay->add_option("--jitter-tolerance", lay.params.jitter_tolerance,
                        "Adaptive speed tolerance")
        ->capture_default_str();
    cmd_lay->add_option("--tolerance", lay.params.displacement_tolerance,
                        "Mean-displacement stop threshold")
        ->capture_default_str();
    cmd_lay->add_option("--iterations", lay.params.max_iterations, "Maximum iterations")
        ->capture_default_str();
    cmd_lay->add_flag("--barnes-hut,!--exact", lay.params.use_barnes_hut,
                      "Barnes-Hut repulsion (default) vs exact pairwise")
        ->capture_default_str();
    cmd_lay->add_flag("--svg", lay.svg, "Also render layout.svg")->capture_default_str();
    cmd_lay->add_flag("--svg-subcategories", lay.svg_subcategories,
                      "Color neutral nodes by subcategory");
    cmd_lay->add_option("--min-px", lay.min_px, "Smallest node radius")->capture_default_str();
    cmd_lay->add_option("--max-px", lay.max_px, "Largest node radius")->capture_default_str();

    GlocalityOpts glo;
    auto* cmd_glo = app.add_subcommand("glocality", "Topic and geographic glocality");
    add_common(cmd_glo, glo.common);
    cmd_glo->add_option("--input", glo.input, "Snapshot manifest (posts optional)")
        ->required();
    cmd_glo->add_option("--lexicon", glo.lexicon_path,
                        "Topic lexicon (default: shipped lexicon_default.txt)");
    cmd_glo->add_option("--gazetteer", glo.gazetteer_path,
                        "Gazetteer (default: shipped gazetteer_default.csv)");

    SimulateOpts sim;
    auto* cmd_sim = app.add_subcommand("simulate", "Softening ensemble simulation");
    add_common(cmd_sim, sim.common);
    cmd_sim->add_option("--input", sim.input, "Snapshot manifest")->required();
    cmd_sim->add_option("--config", sim.config_path, "Softening key-value config file");
    cmd_sim->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    cmd_sim->add_flag("--per-run", sim.per_run, "Also export raw per-run trajectories")
        ->capture_default_str();
    cmd_sim->add_flag("--record-states", sim.record_states,
                      "Record per-step stances of run 0");
    cmd_sim->add_option("--snapshot-steps", sim.snapshot_steps,
                        "Steps to export as stance-labeled snapshots");

    RerunOpts rer;
    auto* cmd_rer = app.add_subcommand("rerun", "Re-execute a recorded run manifest");
    add_common(cmd_rer, rer.common);
    cmd_rer->add_option("--manifest", rer.manifest, "run_manifest.txt from a previous run")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cmd_gen->parsed()) return cmd_generate(gen);
        if (cmd_ing->parsed()) return cmd_ingest(ing);
        if (cmd_df->parsed()) return cmd_diff(diff);
        if (cmd_cen->parsed()) return cmd_centrality(cen);
        if (cmd_lay->parsed()) return cmd_layout(lay);
        if (cmd_glo->parsed()) return cmd_glocality(glo);
        if (cmd_sim->parsed()) return cmd_simulate(sim);
        if (cmd_rer->parsed()) return cmd_rerun(rer);
    } catch (const Error& e) {
        return error_exit(e);
    } catch (const std::exception& e) {
        nlohmann::json report{{"error", "Internal"}, {"detail", e.what()}};
        std::cerr << report.dump() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
