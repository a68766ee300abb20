import concurrent.futures
import logging

logger = logging.getLogger(__name__)


def execute_in_pool(function, items, workers=1, description='task'):
    '''
    Given a function taking one item, a sequence of items, a worker count, and a description for
    logging, call the function on every item and return the results in item order regardless of
    completion order.

    With one worker, run serially in the calling thread. Otherwise use a thread pool. The first
    exception raised by any call propagates once the remaining calls finish.
    '''
    items = list(items)

    if workers is None or workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]

    logger.debug(f'Running {len(items)} {description}s across {workers} workers')

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))
