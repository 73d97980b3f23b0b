#pragma once

#include "memdrift/corpus.hpp"
#include "memdrift/error.hpp"
#include "memdrift/extraction.hpp"
#include "memdrift/graph.hpp"
#include "memdrift/hashing.hpp"
#include "memdrift/live_client.hpp"
#include "memdrift/metrics.hpp"
#include "memdrift/modelclient.hpp"
#include "memdrift/pipeline.hpp"
#include "memdrift/promptgen.hpp"
#include "memdrift/random.hpp"
#include "memdrift/report.hpp"
#include "memdrift/sampling.hpp"
#include "memdrift/templates.hpp"
#include "memdrift/text.hpp"
#include "memdrift/tokens.hpp"
