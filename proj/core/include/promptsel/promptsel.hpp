#pragma once

#include "promptsel/config.hpp"
#include "promptsel/corpus.hpp"
#include "promptsel/decoder.hpp"
#include "promptsel/embedder.hpp"
#include "promptsel/error.hpp"
#include "promptsel/evaluation.hpp"
#include "promptsel/label_scheme.hpp"
#include "promptsel/plm_client.hpp"
#include "promptsel/prompting.hpp"
#include "promptsel/scoring.hpp"
#include "promptsel/tuner.hpp"
