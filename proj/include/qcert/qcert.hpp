#pragma once

#include <qcert/certifier.hpp>
#include <qcert/config.hpp>
#include <qcert/corpus.hpp>
#include <qcert/error.hpp>
#include <qcert/expression.hpp>
#include <qcert/function_model.hpp>
#include <qcert/level_tracer.hpp>
#include <qcert/linalg.hpp>
#include <qcert/oracle.hpp>
#include <qcert/property_n.hpp>
#include <qcert/random.hpp>
#include <qcert/report.hpp>
#include <qcert/run.hpp>
