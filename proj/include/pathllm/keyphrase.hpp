#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pathllm/graph.hpp"

namespace pathllm {

using StopwordList = std::unordered_set<std::string>;

const StopwordList& default_stopwords();

// One lowercased word per line; '#' lines and blanks ignored.
StopwordList load_stopwords(const std::string& path);

struct KeyphraseSet {
  NodeId node = 0;
  std::vector<std::pair<std::string, double>> phrases;  // score non-increasing

  // Ranker diagnostics: the stationary word scores (a probability simplex),
  // the power-iteration count and the final L1 residual.
  std::vector<std::pair<std::string, double>> word_scores;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Position-biased PageRank keyphrase extraction over `text` (already
// cleaned). Candidate words are lowercased alphanumeric tokens of length
// >= 3 outside the stopword list; the co-occurrence graph uses a sliding
// window of 3 tokens; the teleport distribution weights each word by the
// sum of reciprocal occurrence positions. Candidate phrases are contiguous
// candidate runs of at most 3 words scored by summed word scores. Returns
// the top max_phrases, ties broken by earlier first occurrence.
KeyphraseSet extract_keyphrases(const std::string& text,
                                std::size_t max_phrases,
                                const StopwordList& stopwords);

KeyphraseSet extract_keyphrases(const std::string& text,
                                std::size_t max_phrases = 5);

}  // namespace pathllm
