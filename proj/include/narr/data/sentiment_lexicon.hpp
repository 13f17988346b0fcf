#pragma once

// Generated by tools/embed_wordlists.py from data/; keep in sync (checked by tests).

#include <array>
#include <string_view>

namespace narr::data {

inline constexpr std::array<std::string_view, 101> kPositiveWords = {
    "adoption", "amazing", "approval", "approve", "approved", "awesome", "beautiful", "benefit",
    "benefits", "best", "better", "boom", "booming", "breakout", "breakthrough", "bright",
    "brilliant", "bull", "bullish", "celebrate", "confident", "congrats", "congratulations", "easy",
    "efficient", "excellent", "excited", "exciting", "fantastic", "fast", "free", "gain", "gaining",
    "gains", "good", "great", "grow", "growing", "growth", "happy", "hope", "hopeful", "impressive",
    "improve", "improved", "improvement", "incredible", "innovation", "innovative", "legal",
    "legit", "like", "love", "moon", "mooning", "nice", "opportunities", "opportunity",
    "optimistic", "positive", "profit", "profitable", "profits", "promising", "rallies", "rally",
    "rebound", "record", "recover", "recovery", "revolutionary", "rich", "rise", "rises", "rising",
    "safe", "secure", "soar", "soaring", "stability", "stable", "strong", "stronger", "success",
    "successful", "support", "supportive", "surge", "surging", "thank", "thanks", "thrive",
    "thriving", "trust", "trusted", "upgrade", "uptrend", "wealth", "win", "winning", "wonderful",
};

inline constexpr std::array<std::string_view, 106> kNegativeWords = {
    "angry", "arrest", "arrested", "awful", "bad", "ban", "bankrupt", "bankruptcy", "banned",
    "banning", "bear", "bearish", "bubble", "collapse", "collapsed", "concern", "concerns",
    "crackdown", "crash", "crashes", "crashing", "danger", "dangerous", "dead", "death", "decline",
    "declining", "doubt", "downtrend", "drop", "dropped", "dropping", "dump", "dumping", "fail",
    "failed", "failing", "failure", "fall", "falling", "falls", "fear", "fearful", "fell", "fined",
    "fraud", "fraudulent", "hack", "hacked", "hacker", "hacks", "hate", "horrible", "illegal",
    "insolvent", "investigation", "kill", "killed", "lawsuit", "lose", "losing", "loss", "losses",
    "lost", "manipulated", "manipulation", "negative", "panic", "pessimistic", "plummet",
    "plummeting", "plunge", "plunging", "ponzi", "problem", "problems", "risk", "risky", "sad",
    "scam", "scams", "sell", "selloff", "shutdown", "steal", "stolen", "sued", "suspend",
    "suspended", "terrible", "theft", "trouble", "ugly", "uncertain", "uncertainty", "volatile",
    "volatility", "warn", "warning", "warns", "weak", "weakness", "worried", "worry", "worse",
    "worst",
};

}  // namespace narr::data
