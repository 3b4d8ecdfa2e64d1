# Tasks package