#pragma once

// Nested named-entity recognition toolkit: linear-chain CRF sequence
// labeling with a joint-tag scheme for two-level nested entities, Brown
// clustering, feature templates, and CoNLL-style evaluation.

#include "nner/brown.hpp"
#include "nner/conll.hpp"
#include "nner/corpus.hpp"
#include "nner/crf.hpp"
#include "nner/enamex.hpp"
#include "nner/error.hpp"
#include "nner/eval.hpp"
#include "nner/features.hpp"
#include "nner/nested.hpp"
#include "nner/optimize.hpp"
#include "nner/preprocess.hpp"
#include "nner/tags.hpp"
#include "nner/types.hpp"
#include "nner/unicode.hpp"
