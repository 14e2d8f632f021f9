#include "pathllm/keyphrase.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <unordered_map>

#include "pathllm/io_util.hpp"
#include "pathllm/text_clean.hpp"

namespace pathllm {

namespace {

constexpr double kDamping = 0.85;
constexpr double kConvergence = 1e-8;
constexpr std::size_t kMaxIterations = 1000;
constexpr std::size_t kWindow = 3;
constexpr std::size_t kMaxPhraseWords = 3;
constexpr std::size_t kMinWordLength = 3;

const char* const kDefaultStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "am",
    "an", "and", "any", "are", "as", "at", "be", "because", "been", "before",
    "being", "below", "between", "both", "but", "by", "can", "cannot",
    "could", "did", "do", "does", "doing", "down", "during", "each", "etc",
    "few", "for", "from", "further", "had", "has", "have", "having", "he",
    "her", "here", "hers", "him", "his", "how", "i", "if", "in", "into",
    "is", "it", "its", "itself", "just", "may", "me", "might", "more",
    "most", "must", "my", "no", "nor", "not", "now", "of", "off", "on",
    "once", "only", "or", "other", "our", "ours", "out", "over", "own",
    "same", "shall", "she", "should", "so", "some", "such", "than", "that",
    "the", "their", "theirs", "them", "then", "there", "these", "they",
    "this", "those", "through", "to", "too", "under", "until", "up", "upon",
    "us", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your",
    "yours",
};

// Lowercased alphanumeric word runs; punctuation and whitespace separate.
std::vector<std::string> word_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

}  // namespace

const StopwordList& default_stopwords() {
  static const StopwordList list(std::begin(kDefaultStopwords),
                                 std::end(kDefaultStopwords));
  return list;
}

StopwordList load_stopwords(const std::string& path) {
  StopwordList list;
  std::string blob = read_text_file(path);
  std::string line;
  for (std::size_t i = 0; i <= blob.size(); ++i) {
    if (i == blob.size() || blob[i] == '\n') {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') {
        list.insert(lowercase_ascii(line));
      }
      line.clear();
    } else {
      line += blob[i];
    }
  }
  return list;
}

KeyphraseSet extract_keyphrases(const std::string& text,
                                std::size_t max_phrases,
                                const StopwordList& stopwords) {
  KeyphraseSet result;
  std::vector<std::string> tokens = word_tokens(text);

  std::vector<bool> is_candidate(tokens.size(), false);
  std::unordered_map<std::string, std::size_t> word_index;
  std::vector<std::string> words;
  std::vector<std::size_t> token_word(tokens.size(), 0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (tok.size() < kMinWordLength || stopwords.count(tok)) continue;
    is_candidate[i] = true;
    auto [it, inserted] = word_index.emplace(tok, words.size());
    if (inserted) words.push_back(tok);
    token_word[i] = it->second;
  }
  if (words.empty()) return result;
  const std::size_t n = words.size();

  // Teleport weights: sum of reciprocal 1-indexed positions, normalized.
  std::vector<double> teleport(n, 0.0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_candidate[i]) {
      teleport[token_word[i]] += 1.0 / static_cast<double>(i + 1);
    }
  }
  double tsum = 0.0;
  for (double t : teleport) tsum += t;
  for (double& t : teleport) t /= tsum;

  // Co-occurrence weights within the sliding window.
  std::map<std::pair<std::size_t, std::size_t>, double> edge_weight;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_candidate[i]) continue;
    for (std::size_t j = i + 1; j < tokens.size() && j < i + kWindow; ++j) {
      if (!is_candidate[j]) continue;
      std::size_t a = token_word[i];
      std::size_t b = token_word[j];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      edge_weight[{a, b}] += 1.0;
    }
  }
  std::vector<double> degree(n, 0.0);
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& [pair, w] : edge_weight) {
    adj[pair.first].emplace_back(pair.second, w);
    adj[pair.second].emplace_back(pair.first, w);
    degree[pair.first] += w;
    degree[pair.second] += w;
  }

  // Personalized PageRank; dangling mass flows back to the teleport
  // distribution so the score vector stays on the simplex.
  std::vector<double> score = teleport;
  std::vector<double> next(n, 0.0);
  for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (degree[u] == 0.0) dangling += score[u];
    }
    for (std::size_t v = 0; v < n; ++v) {
      double in = 0.0;
      for (const auto& [u, w] : adj[v]) in += score[u] * w / degree[u];
      next[v] = (1.0 - kDamping) * teleport[v] +
                kDamping * (in + dangling * teleport[v]);
    }
    double l1 = 0.0;
    for (std::size_t v = 0; v < n; ++v) l1 += std::fabs(next[v] - score[v]);
    score.swap(next);
    result.iterations = iter + 1;
    result.residual = l1;
    if (l1 < kConvergence) break;
  }
  result.word_scores.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    result.word_scores.emplace_back(words[w], score[w]);
  }

  // Candidate phrases: contiguous candidate runs chunked to <= 3 words.
  struct Phrase {
    std::string text;
    double score = 0.0;
    std::size_t first_pos = 0;
  };
  std::vector<Phrase> phrases;
  std::unordered_map<std::string, std::size_t> phrase_index;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!is_candidate[i]) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < tokens.size() && is_candidate[run_end]) ++run_end;
    for (std::size_t start = i; start < run_end; start += kMaxPhraseWords) {
      std::size_t stop = std::min(start + kMaxPhraseWords, run_end);
      Phrase p;
      p.first_pos = start;
      for (std::size_t t = start; t < stop; ++t) {
        if (!p.text.empty()) p.text += ' ';
        p.text += tokens[t];
        p.score += score[token_word[t]];
      }
      auto [it, inserted] = phrase_index.emplace(p.text, phrases.size());
      if (inserted) phrases.push_back(std::move(p));
    }
    i = run_end;
  }

  std::sort(phrases.begin(), phrases.end(), [](const Phrase& a, const Phrase& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.first_pos < b.first_pos;
  });
  for (std::size_t p = 0; p < phrases.size() && p < max_phrases; ++p) {
    result.phrases.emplace_back(phrases[p].text, phrases[p].score);
  }
  return result;
}

KeyphraseSet extract_keyphrases(const std::string& text,
                                std::size_t max_phrases) {
  return extract_keyphrases(text, max_phrases, default_stopwords());
}

}  // namespace pathllm
