#pragma once

#include "smishaug/analytics.hpp"
#include "smishaug/config.hpp"
#include "smishaug/corpus.hpp"
#include "smishaug/csv.hpp"
#include "smishaug/eda.hpp"
#include "smishaug/error.hpp"
#include "smishaug/evalkit.hpp"
#include "smishaug/hash.hpp"
#include "smishaug/llm_gateway.hpp"
#include "smishaug/pipeline.hpp"
#include "smishaug/principle.hpp"
#include "smishaug/promptgen.hpp"
#include "smishaug/taxonomy.hpp"
#include "smishaug/text.hpp"
#include "smishaug/validator.hpp"
