#pragma once

// Slow, obviously-correct reference computations used to check the library.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Best total weight over all partial injections rows -> columns.
inline double brute_assignment(const std::vector<std::vector<double>>& w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows == 0 ? 0 : w[0].size();
  std::vector<bool> used(cols, false);
  std::function<double(std::size_t)> go = [&](std::size_t r) -> double {
    if (r == rows) return 0.0;
    double best = go(r + 1);  // row r unmatched
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = true;
      best = std::max(best, w[r][c] + go(r + 1));
      used[c] = false;
    }
    return best;
  };
  return go(0);
}

// Component label of every node: its smallest reachable node.
inline std::vector<std::size_t> bfs_components(std::size_t n,
                                               const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::size_t> label(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    std::deque<std::size_t> q{s};
    label[s] = s;
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      for (auto v : adj[u]) {
        if (label[v] == n) {
          label[v] = s;
          q.push_back(v);
        }
      }
    }
  }
  return label;
}

// ASCII only.
inline std::map<std::string, int> trigrams(const std::string& s) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) ++out[s.substr(i, 3)];
  return out;
}

inline double dice(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
  int inter = 0, na = 0, nb = 0;
  for (auto& [k, v] : a) {
    na += v;
    auto it = b.find(k);
    if (it != b.end()) inter += std::min(v, it->second);
  }
  for (auto& [k, v] : b) nb += v;
  return na + nb == 0 ? -1.0 : 2.0 * inter / (na + nb);
}

inline std::size_t lcs(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) t[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) t[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = std::min({t[i - 1][j] + 1, t[i][j - 1] + 1, t[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return t[a.size()][b.size()];
}

// ASCII rotations of w + '$'.
inline std::vector<std::string> rotations(const std::string& w) {
  const std::string s = w + "$";
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s.substr(i) + s.substr(0, i));
  return out;
}

// Literal retrieval rule applied to every stored key.
inline std::set<std::string> brute_lookup(const std::map<std::string, std::set<std::string>>& keys,
                                          const std::string& q) {
  std::set<std::string> out;
  for (const auto& r : rotations(q)) {
    const std::string b = r.substr(0, r.size() - 1);
    const std::size_t n = r.size();
    for (const auto& [key, ids] : keys) {
      const bool by_b = key.compare(0, b.size(), b) == 0 && key.size() <= n;
      const bool by_r = key.compare(0, r.size(), r) == 0 && key.size() <= n + 1;
      if (by_b || by_r) out.insert(ids.begin(), ids.end());
    }
  }
  return out;
}

// Pairwise co-membership counts: (gold links, predicted links, shared links).
struct LinkCounts {
  std::size_t gold = 0, predicted = 0, both = 0;
};

inline LinkCounts link_counts(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred) {
  LinkCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i)
    for (std::size_t j = i + 1; j < gold.size(); ++j) {
      const bool g = gold[i] == gold[j], p = pred[i] == pred[j];
      c.gold += g;
      c.predicted += p;
      c.both += g && p;
    }
  return c;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                               std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz") {
  const std::size_t len = std::uniform_int_distribution<std::size_t>(min_len, max_len)(rng);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[pick(rng)];
  return s;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("citematch-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::string out;
  if (FILE* f = std::fopen(p.c_str(), "rb")) {
    char buf[65536];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
    std::fclose(f);
  }
  return out;
}

}  // namespace oracle
