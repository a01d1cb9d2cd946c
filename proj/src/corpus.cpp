// SPDX-License-Identifier: Apache-2.0
#include "csrec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace csrec::corpus {

std::uint32_t IdMap::intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
}

std::optional<std::uint32_t> IdMap::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t InteractionLog::n_interactions() const {
    std::size_t n = 0;
    for (const auto& v : by_user) n += v.size();
    return n;
}

double InteractionLog::density() const {
    if (n_users() == 0 || n_items() == 0) return 0.0;
    return double(n_interactions()) / (double(n_users()) * double(n_items()));
}

void SplitConfig::validate() const {
    if (min_train < 1 || min_val < 1 || min_test < 1)
        throw ConfigError("split: min_train/min_val/min_test must be >= 1");
    if (max_relevant < 1) throw ConfigError("split: max_relevant must be >= 1");
    if (candidate_total <= min_val || candidate_total <= min_test)
        throw ConfigError("split: candidate_total must exceed min_val and min_test");
    if (max_relevant < min_total())
        throw ConfigError("split: max_relevant below min_train+min_val+min_test");
}

std::vector<ItemId> SplitDataset::relevant_of(UserId u) const {
    std::vector<ItemId> out;
    out.reserve(train[u].size() + val[u].size() + test[u].size());
    out.insert(out.end(), train[u].begin(), train[u].end());
    out.insert(out.end(), val[u].begin(), val[u].end());
    out.insert(out.end(), test[u].begin(), test[u].end());
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t SplitDataset::n_train_samples(std::uint32_t neg_ratio) const {
    std::size_t n = 0;
    for (const auto& t : train) n += t.size() * (1 + std::size_t(neg_ratio));
    return n;
}

namespace {

std::vector<std::string> split_fields(const std::string& line, const std::string& delim) {
    std::vector<std::string> fields;
    if (delim.empty()) {  // any run of whitespace
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) fields.push_back(tok);
        return fields;
    }
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t next = line.find(delim, pos);
        if (next == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, next - pos));
        pos = next + delim.size();
    }
    // trim stray whitespace / CR around fields
    for (auto& f : fields) {
        while (!f.empty() && std::isspace(static_cast<unsigned char>(f.back()))) f.pop_back();
        std::size_t b = 0;
        while (b < f.size() && std::isspace(static_cast<unsigned char>(f[b]))) b++;
        f.erase(0, b);
    }
    return fields;
}

std::string detect_delimiter(const std::string& line) {
    if (line.find("::") != std::string::npos) return "::";
    if (line.find('\t') != std::string::npos) return "\t";
    if (line.find(',') != std::string::npos) return ",";
    return "";  // whitespace
}

bool looks_like_header(const std::vector<std::string>& fields) {
    if (fields.size() < 2) return false;
    auto lower = [](std::string s) {
        for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    const std::string a = lower(fields[0]), b = lower(fields[1]);
    auto is_name = [](const std::string& s) {
        return s.rfind("user", 0) == 0 || s.rfind("item", 0) == 0 || s == "uid" || s == "iid" ||
               s == "movieid" || s == "id";
    };
    return is_name(a) || is_name(b);
}

// Uniform sample (without replacement) of `want` elements from
// {0..n_items-1} \ exclude. exclude must be sorted. Returns all eligible
// items in ascending order when want >= pool size.
std::vector<ItemId> sample_complement(std::uint32_t n_items, const std::vector<ItemId>& exclude,
                                      std::size_t want, std::mt19937_64& gen) {
    const std::size_t pool = n_items - exclude.size();
    if (want >= pool) {
        std::vector<ItemId> out;
        out.reserve(pool);
        std::size_t e = 0;
        for (ItemId i = 0; i < n_items; ++i) {
            while (e < exclude.size() && exclude[e] < i) ++e;
            if (e < exclude.size() && exclude[e] == i) continue;
            out.push_back(i);
        }
        return out;
    }
    if (want * 2 >= pool) {
        // dense request: materialize the pool and partially shuffle
        std::vector<ItemId> all;
        all.reserve(pool);
        std::size_t e = 0;
        for (ItemId i = 0; i < n_items; ++i) {
            while (e < exclude.size() && exclude[e] < i) ++e;
            if (e < exclude.size() && exclude[e] == i) continue;
            all.push_back(i);
        }
        for (std::size_t j = 0; j < want; ++j) {
            std::uniform_int_distribution<std::size_t> d(j, all.size() - 1);
            std::swap(all[j], all[d(gen)]);
        }
        all.resize(want);
        return all;
    }
    // sparse request: rejection sampling
    std::vector<ItemId> out;
    out.reserve(want);
    std::unordered_set<ItemId> chosen;
    std::uniform_int_distribution<ItemId> d(0, n_items - 1);
    while (out.size() < want) {
        ItemId i = d(gen);
        if (std::binary_search(exclude.begin(), exclude.end(), i)) continue;
        if (!chosen.insert(i).second) continue;
        out.push_back(i);
    }
    return out;
}

std::vector<ItemId> sample_complement_with_replacement(std::uint32_t n_items,
                                                       const std::vector<ItemId>& exclude,
                                                       std::size_t want, std::mt19937_64& gen) {
    std::vector<ItemId> out;
    out.reserve(want);
    std::uniform_int_distribution<ItemId> d(0, n_items - 1);
    while (out.size() < want) {
        ItemId i = d(gen);
        if (std::binary_search(exclude.begin(), exclude.end(), i)) continue;
        out.push_back(i);
    }
    return out;
}

}  // namespace

InteractionLog load_interactions(const std::filesystem::path& path, const InputFormat& fmt) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open interaction file: " + path.string());

    InteractionLog log;
    std::unordered_set<std::uint64_t> seen;
    std::string line;
    std::string delim = fmt.delimiter;
    std::size_t line_no = 0;
    bool first_data_line = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (delim.empty() && fmt.delimiter.empty() && first_data_line) delim = detect_delimiter(line);
        auto fields = split_fields(line, delim);
        if (first_data_line) {
            first_data_line = false;
            if (looks_like_header(fields)) continue;
        }
        if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
            throw DataError("malformed row at line " + std::to_string(line_no) + " in " +
                            path.string());
        UserId u = log.users.intern(fields[0]);
        ItemId i = log.items.intern(fields[1]);
        if (log.by_user.size() <= u) log.by_user.resize(u + 1);
        std::uint64_t key = (std::uint64_t(u) << 32) | i;
        if (seen.insert(key).second) log.by_user[u].push_back(i);
    }
    if (log.n_interactions() == 0) throw DataError("empty log: " + path.string());
    return log;
}

InteractionLog filter_and_truncate(const InteractionLog& log, const SplitConfig& cfg) {
    cfg.validate();
    const std::uint32_t min_total = cfg.min_total();

    InteractionLog out;
    for (UserId u = 0; u < log.n_users(); ++u) {
        const auto& items = log.by_user[u];
        if (items.size() < min_total) continue;

        std::vector<ItemId> kept;
        if (items.size() > cfg.max_relevant) {
            // seeded uniform choice of max_relevant items, first-seen order kept
            auto gen = rng::engine(cfg.seed, {rng::kTruncate, u});
            std::vector<std::uint32_t> idx(items.size());
            std::iota(idx.begin(), idx.end(), 0u);
            for (std::uint32_t j = 0; j < cfg.max_relevant; ++j) {
                std::uniform_int_distribution<std::uint32_t> d(j, std::uint32_t(idx.size()) - 1);
                std::swap(idx[j], idx[d(gen)]);
            }
            idx.resize(cfg.max_relevant);
            std::sort(idx.begin(), idx.end());
            kept.reserve(cfg.max_relevant);
            for (auto j : idx) kept.push_back(items[j]);
        } else {
            kept = items;
        }

        UserId nu = out.users.intern(log.users.name(u));
        out.by_user.resize(nu + 1);
        auto& row = out.by_user[nu];
        row.reserve(kept.size());
        for (ItemId i : kept) row.push_back(out.items.intern(log.items.name(i)));
    }
    if (out.n_users() == 0) throw DataError("no eligible users after filtering");
    return out;
}

SplitDataset split(const InteractionLog& log, const SplitConfig& cfg) {
    cfg.validate();
    const auto n_users = static_cast<std::uint32_t>(log.n_users());
    SplitDataset ds;
    ds.n_users = n_users;
    ds.n_items = static_cast<std::uint32_t>(log.n_items());
    ds.neg_ratio = cfg.neg_ratio;
    ds.train.resize(n_users);
    ds.val.resize(n_users);
    ds.test.resize(n_users);

    const std::uint64_t s = cfg.min_total();
    for (UserId u = 0; u < n_users; ++u) {
        std::vector<ItemId> items = log.by_user[u];
        if (items.size() < s)
            throw DataError("split: user " + log.users.name(u) + " has fewer than min_total items");
        auto gen = rng::engine(cfg.seed, {rng::kSplit, u});
        std::shuffle(items.begin(), items.end(), gen);

        const std::uint64_t m = items.size();
        const auto val_n = std::size_t(m * cfg.min_val / s);
        const auto test_n = std::size_t(m * cfg.min_test / s);
        const std::size_t train_n = std::size_t(m) - val_n - test_n;  // leftovers go to train

        ds.train[u].assign(items.begin(), items.begin() + train_n);
        ds.val[u].assign(items.begin() + train_n, items.begin() + train_n + val_n);
        ds.test[u].assign(items.begin() + train_n + val_n, items.end());
        std::sort(ds.train[u].begin(), ds.train[u].end());
        std::sort(ds.val[u].begin(), ds.val[u].end());
        std::sort(ds.test[u].begin(), ds.test[u].end());
    }
    return ds;
}

NegativeSamples sample_training_negatives(const SplitDataset& split, std::uint32_t neg_ratio,
                                          std::uint64_t seed, std::uint64_t epoch) {
    NegativeSamples out;
    out.by_user.resize(split.n_users);
    for (UserId u = 0; u < split.n_users; ++u) {
        const std::size_t want = std::size_t(neg_ratio) * split.train[u].size();
        if (want == 0) continue;
        const auto relevant = split.relevant_of(u);
        const std::size_t pool = split.n_items - relevant.size();
        if (pool == 0)
            throw DataError("negative sampling: user has no irrelevant items in the catalog");
        auto gen = rng::engine(seed, {rng::kNegatives, epoch, u});
        if (want <= pool) {
            out.by_user[u] = sample_complement(split.n_items, relevant, want, gen);
        } else {
            out.by_user[u] = sample_complement_with_replacement(split.n_items, relevant, want, gen);
            out.replacement_users.push_back(u);
        }
    }
    return out;
}

std::vector<std::vector<ItemId>> build_candidates(const SplitDataset& split, EvalSide side,
                                                  const SplitConfig& cfg) {
    const auto& side_items = side == EvalSide::val ? split.val : split.test;
    std::vector<std::vector<ItemId>> out(split.n_users);
    for (UserId u = 0; u < split.n_users; ++u) {
        const auto& rel = side_items[u];
        const auto all_relevant = split.relevant_of(u);
        const std::size_t other = all_relevant.size() - rel.size();
        const std::size_t target =
            std::max<std::size_t>(rel.size(),
                                  std::min<std::size_t>(cfg.candidate_total, split.n_items - other));
        auto gen = rng::engine(cfg.seed, {rng::kCandidates, side == EvalSide::val ? 0u : 1u, u});
        auto sampled = sample_complement(split.n_items, all_relevant, target - rel.size(), gen);
        auto& list = out[u];
        list.reserve(target);
        list.insert(list.end(), rel.begin(), rel.end());
        list.insert(list.end(), sampled.begin(), sampled.end());
    }
    return out;
}

}  // namespace csrec::corpus
