// Convenience umbrella: the whole library.
#pragma once

#include "canrev/ingest.hpp"
#include "canrev/naming.hpp"
#include "canrev/pipeline.hpp"
#include "canrev/report.hpp"
#include "canrev/signal.hpp"
#include "canrev/synth.hpp"
#include "canrev/tokenizer.hpp"
#include "canrev/types.hpp"
