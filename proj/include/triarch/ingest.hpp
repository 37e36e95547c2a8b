#pragma once
// On-disk formats: node/edge/post CSV files, snapshot manifests, topic
// lexicons, and gazetteers. Loaders validate against the domain invariants
// and either throw triarch::Error or collect ValidationWarnings; savers
// write the canonical form that load reproduces exactly.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "triarch/csv.hpp"
#include "triarch/error.hpp"
#include "triarch/glocality.hpp"
#include "triarch/graph.hpp"
#include "triarch/records.hpp"
#include "triarch/timeutil.hpp"

namespace triarch {

inline constexpr std::string_view kNodesHeader[] = {"id",        "stance", "subcategory",
                                                    "fan_count", "title",  "location",
                                                    "lat",       "lon"};
inline constexpr std::string_view kEdgesHeader[] = {"source", "target"};
inline constexpr std::string_view kPostsHeader[] = {"page_id", "timestamp", "text"};
inline constexpr std::string_view kGazetteerHeader[] = {"toponym", "scale"};

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return in;
}

// Required columns must appear first, in order; extra columns produce a
// warning and are ignored so enriched exports still load.
template <std::size_t N>
std::size_t check_header(const std::vector<std::string>& row,
                         const std::string_view (&expected)[N],
                         std::vector<ValidationWarning>* warnings) {
    if (row.size() < N)
        throw Error(ErrorKind::MissingHeader, "expected at least " + std::to_string(N) +
                                                  " columns, found " +
                                                  std::to_string(row.size()));
    for (std::size_t i = 0; i < N; ++i) {
        if (to_lower(row[i]) != expected[i])
            throw Error(ErrorKind::MissingHeader,
                        "column " + std::to_string(i + 1) + " must be '" +
                            std::string(expected[i]) + "', found '" + row[i] + "'");
    }
    if (warnings && row.size() > N) {
        std::string extras;
        for (std::size_t i = N; i < row.size(); ++i) {
            if (!extras.empty()) extras += ", ";
            extras += row[i];
        }
        warnings->push_back({1, "ignoring extra columns: " + extras});
    }
    return N;
}

}  // namespace detail

struct NodesFile {
    std::vector<PageNode> nodes;
    std::vector<ValidationWarning> warnings;
};

inline NodesFile load_nodes(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header) throw Error(ErrorKind::MissingHeader, "empty file " + path.string());

    NodesFile out;
    detail::check_header(*header, kNodesHeader, &out.warnings);
    std::unordered_set<std::string> seen;
    while (auto row = reader.next()) {
        const long line = reader.row_line();
        if (row->size() < 8)
            throw Error(ErrorKind::BadRow, "expected 8 fields, found " +
                                               std::to_string(row->size()), line);
        PageNode node;
        node.id = (*row)[0];
        if (node.id.empty()) throw Error(ErrorKind::BadRow, "empty id", line);
        if (!seen.insert(node.id).second)
            throw Error(ErrorKind::DuplicateId, "id '" + node.id + "'", line);

        auto stance = parse_stance((*row)[1]);
        if (!stance) throw Error(ErrorKind::BadStance, "'" + (*row)[1] + "'", line);
        node.stance = *stance;

        const std::string& subcat = (*row)[2];
        if (!subcat.empty()) {
            auto parsed = parse_subcategory(subcat);
            if (!parsed) {
                out.warnings.push_back({line, "unknown subcategory '" + subcat + "' ignored"});
            } else if (node.stance != Stance::Neutral) {
                out.warnings.push_back(
                    {line, "subcategory given for non-neutral page, ignored"});
            } else {
                node.subcategory = parsed;
            }
        } else if (node.stance == Stance::Neutral) {
            out.warnings.push_back({line, "neutral page without subcategory"});
        }

        auto fans = parse_u64((*row)[3]);
        if (!fans) throw Error(ErrorKind::BadRow, "bad fan_count '" + (*row)[3] + "'", line);
        node.fan_count = *fans;
        node.title = (*row)[4];
        node.location_text = (*row)[5];

        const std::string& lat_s = (*row)[6];
        const std::string& lon_s = (*row)[7];
        if (lat_s.empty() != lon_s.empty())
            throw Error(ErrorKind::BadCoordinate, "lat and lon must be given together", line);
        if (!lat_s.empty()) {
            auto lat = parse_double(lat_s);
            auto lon = parse_double(lon_s);
            if (!lat || !lon)
                throw Error(ErrorKind::BadCoordinate,
                            "'" + lat_s + "','" + lon_s + "'", line);
            if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0)
                throw Error(ErrorKind::BadCoordinate, "coordinates out of range", line);
            node.lat = lat;
            node.lon = lon;
        }
        out.nodes.push_back(std::move(node));
    }
    return out;
}

inline std::vector<FollowEdge> load_edges(const std::filesystem::path& path,
                                          const std::vector<PageNode>& nodes) {
    auto in = detail::open_input(path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header) throw Error(ErrorKind::MissingHeader, "empty file " + path.string());
    detail::check_header(*header, kEdgesHeader, nullptr);

    std::unordered_set<std::string_view> known;
    known.reserve(nodes.size());
    for (const PageNode& n : nodes) known.insert(n.id);

    std::vector<FollowEdge> edges;
    while (auto row = reader.next()) {
        const long line = reader.row_line();
        if (row->size() < 2)
            throw Error(ErrorKind::BadRow, "expected 2 fields", line);
        FollowEdge e{(*row)[0], (*row)[1]};
        if (e.source == e.target)
            throw Error(ErrorKind::SelfLoop, "edge " + e.source + " -> " + e.target, line);
        if (!known.count(e.source) || !known.count(e.target))
            throw Error(ErrorKind::DanglingEdge, "edge " + e.source + " -> " + e.target, line);
        edges.push_back(std::move(e));
    }
    return edges;
}

// Rows are preserved in file order.
inline std::vector<PostRecord> load_posts(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header) throw Error(ErrorKind::MissingHeader, "empty file " + path.string());
    detail::check_header(*header, kPostsHeader, nullptr);

    std::vector<PostRecord> posts;
    while (auto row = reader.next()) {
        const long line = reader.row_line();
        if (row->size() < 3)
            throw Error(ErrorKind::BadRow, "expected 3 fields", line);
        auto ts = parse_iso8601((*row)[1]);
        if (!ts) throw Error(ErrorKind::BadTimestamp, "'" + (*row)[1] + "'", line);
        posts.push_back({(*row)[0], *ts, (*row)[2]});
    }
    return posts;
}

// --------------------------- canonical savers -----------------------------

inline void save_nodes(std::ostream& out, std::span<const PageNode> nodes) {
    out << "id,stance,subcategory,fan_count,title,location,lat,lon\n";
    for (const PageNode& n : nodes) {
        std::vector<std::string> row(8);
        row[0] = n.id;
        row[1] = to_string(n.stance);
        row[2] = n.subcategory ? to_string(*n.subcategory) : "";
        row[3] = std::to_string(n.fan_count);
        row[4] = n.title;
        row[5] = n.location_text;
        row[6] = n.lat ? format_double(*n.lat) : "";
        row[7] = n.lon ? format_double(*n.lon) : "";
        write_csv_row(out, row);
    }
}

inline void save_edges(std::ostream& out, const Snapshot& s) {
    out << "source,target\n";
    for (auto [u, v] : s.edges())
        write_csv_row(out, {s.node(u).id, s.node(v).id});
}

inline void save_posts(std::ostream& out, std::span<const PostRecord> posts) {
    out << "page_id,timestamp,text\n";
    for (const PostRecord& p : posts)
        write_csv_row(out, {p.page_id, format_iso8601(p.timestamp_utc), p.text});
}

// ------------------------------ kv documents ------------------------------
// `key = value` lines, '#' comments, UTF-8. Used by manifests and configs.

struct KvDocument {
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(std::string_view key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return &v;
        return nullptr;
    }

    std::string require(std::string_view key) const {
        const std::string* v = find(key);
        if (!v) throw Error(ErrorKind::BadRow, "missing key '" + std::string(key) + "'");
        return *v;
    }
};

namespace detail {
inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}
}  // namespace detail

inline KvDocument parse_kv(std::istream& in) {
    KvDocument doc;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::BadRow, "expected 'key = value'", line_no);
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::BadRow, "empty key", line_no);
        if (doc.find(key)) throw Error(ErrorKind::BadRow, "duplicate key '" + key + "'", line_no);
        doc.entries.emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

inline KvDocument load_kv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_kv(in);
}

inline void save_kv(std::ostream& out, const KvDocument& doc) {
    for (const auto& [k, v] : doc.entries) out << k << " = " << v << "\n";
}

// ------------------------------- manifests --------------------------------

// Binds a snapshot label to its node/edge (and optional posts) files.
struct SnapshotManifest {
    std::string label;
    std::filesystem::path nodes;
    std::filesystem::path edges;
    std::optional<std::filesystem::path> posts;
};

// Relative paths resolve against the manifest's directory.
inline SnapshotManifest load_snapshot_manifest(const std::filesystem::path& path) {
    const KvDocument doc = load_kv(path);
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    SnapshotManifest m;
    m.label = doc.require("label");
    m.nodes = resolve(doc.require("nodes"));
    m.edges = resolve(doc.require("edges"));
    if (const std::string* p = doc.find("posts")) m.posts = resolve(*p);
    return m;
}

struct LoadedSnapshot {
    Snapshot snapshot;
    std::vector<PostRecord> posts;  // empty when the manifest names none
    std::vector<ValidationWarning> warnings;
};

inline LoadedSnapshot load_snapshot(const SnapshotManifest& m) {
    LoadedSnapshot out;
    NodesFile nf = load_nodes(m.nodes);
    out.warnings = std::move(nf.warnings);
    auto edges = load_edges(m.edges, nf.nodes);
    out.snapshot = build_snapshot(m.label, std::move(nf.nodes), edges);
    if (m.posts) out.posts = load_posts(*m.posts);
    return out;
}

inline LoadedSnapshot load_snapshot(const std::filesystem::path& manifest_path) {
    return load_snapshot(load_snapshot_manifest(manifest_path));
}

// Writes nodes.csv / edges.csv plus a manifest binding them.
inline void save_snapshot(const std::filesystem::path& dir, const Snapshot& s,
                          const std::string& stem = "snapshot") {
    std::filesystem::create_directories(dir);
    const auto nodes_name = stem + "_nodes.csv";
    const auto edges_name = stem + "_edges.csv";
    {
        std::ofstream out(dir / nodes_name, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / nodes_name).string());
        save_nodes(out, s.nodes());
    }
    {
        std::ofstream out(dir / edges_name, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / edges_name).string());
        save_edges(out, s);
    }
    KvDocument doc;
    doc.entries = {{"label", s.label()}, {"nodes", nodes_name}, {"edges", edges_name}};
    std::ofstream out(dir / (stem + ".manifest"), std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + (dir / (stem + ".manifest")).string());
    save_kv(out, doc);
}

// ---------------------------- lexicon format ------------------------------
// One topic per [section]; one case-insensitive keyword pattern per line.

inline TopicLexicon load_lexicon(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    TopicLexicon lex;
    std::string line;
    std::string current;
    std::vector<std::string> patterns;
    long line_no = 0;
    auto flush = [&] {
        if (!current.empty()) lex.add_topic(current, std::move(patterns));
        patterns.clear();
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw Error(ErrorKind::BadRow, "unterminated section header", line_no);
            flush();
            current = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            if (current.empty()) throw Error(ErrorKind::BadRow, "empty topic name", line_no);
        } else {
            if (current.empty())
                throw Error(ErrorKind::BadRow, "pattern before any [topic] header", line_no);
            patterns.push_back(t);
        }
    }
    flush();
    lex.validate();
    return lex;
}

// ---------------------------- gazetteer format -----------------------------

inline Gazetteer load_gazetteer(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header) throw Error(ErrorKind::MissingHeader, "empty file " + path.string());
    detail::check_header(*header, kGazetteerHeader, nullptr);
    Gazetteer gaz;
    while (auto row = reader.next()) {
        const long line = reader.row_line();
        if (row->size() < 2) throw Error(ErrorKind::BadRow, "expected 2 fields", line);
        if ((*row)[0].empty()) throw Error(ErrorKind::BadRow, "empty toponym", line);
        auto scale = parse_scale_family((*row)[1]);
        if (!scale)
            throw Error(ErrorKind::BadRow, "unknown scale family '" + (*row)[1] + "'", line);
        gaz.add((*row)[0], *scale);
    }
    return gaz;
}

}  // namespace triarch
