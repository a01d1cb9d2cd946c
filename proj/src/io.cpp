// SPDX-License-Identifier: Apache-2.0
#include "csrec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace csrec::io {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string render_header(const Header& header) {
    std::string out;
    for (const auto& [k, v] : header) out += "# " + k + "=" + v + "\n";
    return out;
}

HeaderMap read_header(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    HeaderMap map;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        std::size_t start = line.find_first_not_of("# ");
        if (start == std::string::npos) continue;
        std::size_t eq = line.find('=', start);
        if (eq == std::string::npos) continue;
        map[line.substr(start, eq - start)] = line.substr(eq + 1);
    }
    return map;
}

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::uint64_t file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a(ss.str());
}

namespace {

std::vector<std::string> tsv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t next = line.find('\t', pos);
        if (next == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return fields;
}

// Iterate data lines of a TSV file, skipping the '#' header block.
template <typename Fn>
void for_each_row(const fs::path& path, std::size_t min_fields, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = tsv_fields(line);
        if (fields.size() < min_fields)
            throw DataError("malformed row at line " + std::to_string(line_no) + " in " +
                            path.string());
        fn(fields);
    }
}

double parse_double(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw DataError("expected a number, got '" + s + "'");
    }
}

}  // namespace

void write_manifest(const fs::path& path, const corpus::InteractionLog& log,
                    const corpus::SplitDataset& split, const Header& header) {
    std::string out = render_header(header);
    out += "# neg_ratio=" + std::to_string(split.neg_ratio) + "\n";
    static const char* names[3] = {"train", "val", "test"};
    for (corpus::UserId u = 0; u < split.n_users; ++u) {
        const std::vector<corpus::ItemId>* parts[3] = {&split.train[u], &split.val[u],
                                                       &split.test[u]};
        for (int p = 0; p < 3; ++p)
            for (corpus::ItemId i : *parts[p])
                out += log.users.name(u) + "\t" + names[p] + "\t" + log.items.name(i) + "\n";
    }
    atomic_write(path, out);
}

void write_candidates(const fs::path& path, const corpus::InteractionLog& log,
                      const std::vector<std::vector<corpus::ItemId>>& candidates,
                      corpus::EvalSide side, const Header& header) {
    const std::string tag = side == corpus::EvalSide::val ? "val" : "test";
    std::string out = render_header(header);
    for (corpus::UserId u = 0; u < candidates.size(); ++u)
        for (corpus::ItemId i : candidates[u])
            out += log.users.name(u) + "\t" + tag + "\t" + log.items.name(i) + "\n";
    atomic_write(path, out);
}

PreparedData load_prepared(const fs::path& manifest, const fs::path& val_candidates,
                           const fs::path& test_candidates) {
    PreparedData data;
    auto& split = data.split;

    for_each_row(manifest, 3, [&](const std::vector<std::string>& f) {
        const auto u = data.users.intern(f[0]);
        const auto i = data.items.intern(f[2]);
        if (split.train.size() <= u) {
            split.train.resize(u + 1);
            split.val.resize(u + 1);
            split.test.resize(u + 1);
        }
        if (f[1] == "train") split.train[u].push_back(i);
        else if (f[1] == "val") split.val[u].push_back(i);
        else if (f[1] == "test") split.test[u].push_back(i);
        else throw DataError("manifest: unknown partition '" + f[1] + "'");
    });
    if (data.users.size() == 0) throw DataError("manifest is empty: " + manifest.string());
    split.n_users = std::uint32_t(data.users.size());
    split.n_items = std::uint32_t(data.items.size());
    for (auto* part : {&split.train, &split.val, &split.test})
        for (auto& v : *part) std::sort(v.begin(), v.end());

    const auto header = read_header(manifest);
    if (auto it = header.find("neg_ratio"); it != header.end())
        split.neg_ratio = std::uint32_t(std::stoul(it->second));

    auto load_cand = [&](const fs::path& path, const char* tag) {
        std::vector<std::vector<corpus::ItemId>> lists(split.n_users);
        for_each_row(path, 3, [&](const std::vector<std::string>& f) {
            const auto u = data.users.find(f[0]);
            const auto i = data.items.find(f[2]);
            if (!u || !i)
                throw DataError("candidates file references unknown user/item: " + f[0] + "/" +
                                f[2]);
            if (f[1] != tag) throw DataError("candidates file: unexpected side '" + f[1] + "'");
            lists[*u].push_back(*i);
        });
        return lists;
    };
    split.val_candidates = load_cand(val_candidates, "val");
    split.test_candidates = load_cand(test_candidates, "test");
    return data;
}

void save_model(const fs::path& path, const fm::FmModel& model, const fm::TrainConfig& cfg,
                const Header& header) {
    std::string out = render_header(header);
    out += "format\tcsrec-fm-1\n";
    out += "n_users\t" + std::to_string(model.n_users()) + "\n";
    out += "n_items\t" + std::to_string(model.n_items()) + "\n";
    out += "k\t" + std::to_string(model.k()) + "\n";
    out += "lr\t" + fmt_double(cfg.lr) + "\n";
    out += "l2\t" + fmt_double(cfg.l2) + "\n";
    out += "batch_size\t" + std::to_string(cfg.batch_size) + "\n";
    out += "epochs\t" + std::to_string(cfg.epochs) + "\n";
    out += "seed\t" + std::to_string(cfg.seed) + "\n";
    out += "init_scale\t" + fmt_double(cfg.init_scale) + "\n";
    const auto params = model.params();
    out += "params\t" + std::to_string(params.size()) + "\n";
    for (double p : params) {
        out += fmt_double(p);
        out += '\n';
    }
    atomic_write(path, out);
}

LoadedModel load_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model checkpoint " + path.string());
    HeaderMap header;
    std::map<std::string, std::string> meta;
    std::string line;
    std::size_t n_params = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.find_first_not_of("# ");
            std::size_t eq = line.find('=', start);
            if (start != std::string::npos && eq != std::string::npos)
                header[line.substr(start, eq - start)] = line.substr(eq + 1);
            continue;
        }
        auto fields = tsv_fields(line);
        if (fields.size() != 2) throw DataError("model checkpoint: malformed line in " + path.string());
        meta[fields[0]] = fields[1];
        if (fields[0] == "params") {
            n_params = std::stoull(fields[1]);
            break;
        }
    }
    auto need = [&](const char* key) {
        auto it = meta.find(key);
        if (it == meta.end())
            throw DataError("model checkpoint: missing field '" + std::string(key) + "'");
        return it->second;
    };
    if (need("format") != "csrec-fm-1")
        throw DataError("model checkpoint: unsupported format " + meta["format"]);

    fm::TrainConfig cfg;
    cfg.lr = parse_double(need("lr"));
    cfg.l2 = parse_double(need("l2"));
    cfg.batch_size = std::uint32_t(std::stoul(need("batch_size")));
    cfg.epochs = std::uint32_t(std::stoul(need("epochs")));
    cfg.seed = std::stoull(need("seed"));
    cfg.init_scale = parse_double(need("init_scale"));
    cfg.k = std::uint32_t(std::stoul(need("k")));

    fm::FmModel model(std::uint32_t(std::stoul(need("n_users"))),
                      std::uint32_t(std::stoul(need("n_items"))), cfg.k);
    if (model.n_params() != n_params)
        throw DataError("model checkpoint: parameter count mismatch in " + path.string());
    auto params = model.params();
    for (std::size_t i = 0; i < n_params; ++i) {
        if (!std::getline(in, line))
            throw DataError("model checkpoint: truncated parameter block in " + path.string());
        params[i] = parse_double(line);
    }
    return {std::move(model), cfg, std::move(header)};
}

void write_scores(const fs::path& path, const corpus::IdMap& users,
                  const mainstream::Scores& scores, const Header& header) {
    if (scores.score.size() != users.size())
        throw DataError("write_scores: score/user count mismatch");
    Header h = header;
    if (!scores.metadata.empty()) h.emplace_back("metadata", scores.metadata);
    std::string out = render_header(h);
    const std::string method = method_name(scores.method);
    for (std::uint32_t u = 0; u < users.size(); ++u)
        out += users.name(u) + "\t" + method + "\t" + fmt_double(scores.score[u]) + "\n";
    atomic_write(path, out);
}

LoadedScores load_scores(const fs::path& path, const corpus::IdMap& users) {
    LoadedScores out;
    out.header = read_header(path);
    out.score.assign(users.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> filled(users.size(), false);
    for_each_row(path, 3, [&](const std::vector<std::string>& f) {
        auto u = users.find(f[0]);
        if (!u) throw DataError("score file references unknown user '" + f[0] + "': " + path.string());
        if (out.method.empty()) out.method = f[1];
        else if (out.method != f[1])
            throw DataError("score file mixes methods: " + path.string());
        out.score[*u] = parse_double(f[2]);
        filled[*u] = true;
    });
    std::size_t missing = std::count(filled.begin(), filled.end(), false);
    if (missing > 0) {
        std::string sample;
        for (std::uint32_t u = 0; u < users.size() && sample.size() < 120; ++u)
            if (!filled[u]) sample += (sample.empty() ? "" : ", ") + users.name(u);
        throw DataError("score file " + path.string() + " misses " + std::to_string(missing) +
                        " users (e.g. " + sample + ")");
    }
    return out;
}

void write_weights(const fs::path& path, const corpus::IdMap& users,
                   const std::vector<double>& weights, const Header& header) {
    if (weights.size() != users.size()) throw DataError("write_weights: weight/user count mismatch");
    std::string out = render_header(header);
    for (std::uint32_t u = 0; u < users.size(); ++u)
        out += users.name(u) + "\t" + fmt_double(weights[u]) + "\n";
    atomic_write(path, out);
}

std::vector<double> load_weights(const fs::path& path, const corpus::IdMap& users) {
    std::vector<double> weights(users.size(), std::numeric_limits<double>::quiet_NaN());
    for_each_row(path, 2, [&](const std::vector<std::string>& f) {
        auto u = users.find(f[0]);
        if (!u) throw DataError("weight file references unknown user '" + f[0] + "'");
        weights[*u] = parse_double(f[1]);
    });
    for (std::size_t u = 0; u < weights.size(); ++u)
        if (std::isnan(weights[u]))
            throw DataError("weight file " + path.string() + " misses user " +
                            users.name(std::uint32_t(u)));
    return weights;
}

void write_eval(const fs::path& path, const corpus::IdMap& users,
                const std::vector<double>& values, const Header& header) {
    if (values.size() != users.size()) throw DataError("write_eval: value/user count mismatch");
    std::string out = render_header(header);
    for (std::uint32_t u = 0; u < users.size(); ++u)
        out += users.name(u) + "\t" + fmt_double(values[u]) + "\n";
    atomic_write(path, out);
}

LoadedEval load_eval(const fs::path& path) {
    LoadedEval out;
    out.header = read_header(path);
    for_each_row(path, 2, [&](const std::vector<std::string>& f) {
        out.user.push_back(f[0]);
        out.value.push_back(f[1] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                          : parse_double(f[1]));
    });
    return out;
}

}  // namespace csrec::io
