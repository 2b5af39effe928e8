import { fetchTransport } from './bridge.js';
import { AppStore } from './store.js';
import { View } from './view.js';

const root = document.getElementById('app');
if (!root) throw new Error('missing #app container');

const store = new AppStore(fetchTransport());
new View(store, root);

void store.init().then(() => {
  const first = store.state.examples[0];
  if (first) void store.loadExample(first.name);
});
