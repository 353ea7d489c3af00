#pragma once

// Random well-formed extraction records for round-trip property tests.

#include "reqcheck/common/strings.hpp"
#include "reqcheck/extract/records.hpp"

#include <cmath>

#include <random>
#include <string>
#include <vector>

namespace test_gen {

inline std::string random_word(std::mt19937_64& rng, int min_len = 3, int max_len = 9) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz";
    std::uniform_int_distribution<int> length(min_len, max_len);
    std::uniform_int_distribution<int> pick(0, 25);
    std::string word;
    const int n = length(rng);
    for (int i = 0; i < n; ++i) word.push_back(alphabet[pick(rng)]);
    return word;
}

// Prose-like field text: words, commas, digits, parens. Never contains the
// wire delimiters themselves.
inline std::string random_field(std::mt19937_64& rng, int max_words = 8) {
    std::uniform_int_distribution<int> words(1, max_words);
    std::uniform_int_distribution<int> decoration(0, 9);
    std::string text;
    const int n = words(rng);
    for (int i = 0; i < n; ++i) {
        if (i > 0) text += decoration(rng) < 2 ? ", " : " ";
        if (decoration(rng) == 0) {
            text += "(" + std::to_string(decoration(rng)) + "." +
                    std::to_string(decoration(rng)) + ")";
        } else {
            text += random_word(rng);
        }
    }
    return text;
}

struct GeneratedRecords {
    std::vector<reqcheck::extract::EntityRecord> entities;
    std::vector<reqcheck::extract::RelationRecord> relations;
};

inline GeneratedRecords random_records(std::mt19937_64& rng,
                                       const std::vector<std::string>& types) {
    std::uniform_int_distribution<int> entity_count(0, 6);
    std::uniform_int_distribution<int> relation_count(0, 6);
    std::uniform_int_distribution<std::size_t> type_pick(0, types.size() - 1);
    std::uniform_real_distribution<double> strength(1.0, 10.0);
    std::uniform_int_distribution<int> integral(0, 1);

    GeneratedRecords out;
    const int entities = entity_count(rng);
    for (int i = 0; i < entities; ++i) {
        reqcheck::extract::EntityRecord entity;
        entity.name = reqcheck::strings::to_upper(random_word(rng)) + " " +
                      std::to_string(i);
        entity.entity_type = types[type_pick(rng)];
        entity.description = random_field(rng);
        out.entities.push_back(std::move(entity));
    }
    const int relations = relation_count(rng);
    for (int i = 0; i < relations; ++i) {
        reqcheck::extract::RelationRecord relation;
        relation.source = reqcheck::strings::to_upper(random_word(rng)) + " S" +
                          std::to_string(i);
        relation.target = reqcheck::strings::to_upper(random_word(rng)) + " T" +
                          std::to_string(i);
        relation.description = random_field(rng);
        relation.strength = integral(rng) ? std::floor(strength(rng)) : strength(rng);
        if (relation.strength < 1.0) relation.strength = 1.0;
        out.relations.push_back(std::move(relation));
    }
    return out;
}

} // namespace test_gen
