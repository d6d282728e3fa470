// Client for the seal HTTP API. Scores come from the server verbatim; nothing is recomputed here.
'use strict';

const $ = (id) => document.getElementById(id);
const state = { session: null, k: 3, segmented: false, segment: null, pending: false };

async function api(method, url, body, contentType = 'application/json') {
  const init = { method, headers: {} };
  if (body !== undefined) {
    init.body = contentType === 'application/json' ? JSON.stringify(body) : body;
    init.headers['Content-Type'] = contentType;
  }
  const res = await fetch(url, init);
  const data = await res.json().catch(() => ({}));
  if (!res.ok) {
    const err = new Error(data.error ? data.error.message : res.statusText);
    err.status = res.status;
    throw err;
  }
  return data;
}

// One in-flight request at a time; controls are disabled while it runs.
async function busy(fn) {
  if (state.pending) return;
  state.pending = true;
  document.body.classList.add('busy');
  document.querySelectorAll('input, button').forEach((el) => (el.disabled = true));
  try {
    await fn();
  } finally {
    state.pending = false;
    document.body.classList.remove('busy');
    document.querySelectorAll('input, button').forEach((el) => (el.disabled = !!el.dataset.locked));
  }
}

async function refreshHealth() {
  try {
    const h = await api('GET', '/healthz');
    $('health').textContent = `${h.db_records} glyph records`;
  } catch (e) {
    $('health').textContent = 'service unavailable';
  }
}

async function upload(file) {
  $('upload-error').hidden = true;
  $('clusters').hidden = true;
  $('segments').hidden = true;
  try {
    const s = await api('POST', '/api/sessions', await file.arrayBuffer(), 'image/png');
    state.session = s.session_id;
    state.segmented = false;
    await showClusters();
  } catch (e) {
    $('upload-error').textContent = e.message;
    $('upload-error').hidden = false;
  }
}

async function showClusters() {
  const c = await api('GET', `/api/sessions/${state.session}/clusters?k=${state.k}`);
  const box = $('previews');
  box.replaceChildren();
  c.clusters.forEach((cl) => {
    const b = document.createElement('button');
    b.className = 'preview' + (cl.index === c.red_cluster ? ' suggested' : '');
    b.title = `cluster ${cl.index}: ${cl.size} px, redness ${cl.redness.toFixed(2)}`;
    const img = document.createElement('img');
    img.src = cl.preview_url;
    img.alt = b.title;
    b.append(img);
    b.addEventListener('click', () => busy(() => select(cl.index)));
    box.append(b);
  });
  $('clusters').hidden = false;
}

// A session is segmented once; other layers are locked afterwards so the UI never triggers a 409.
async function select(index) {
  const sel = await api('POST', `/api/sessions/${state.session}/select`, { cluster_index: index, k: state.k });
  state.segmented = true;
  document.querySelectorAll('.preview').forEach((b, i) => {
    if (i !== index) b.dataset.locked = '1';
  });
  const wrap = $('overlay-wrap');
  wrap.querySelectorAll('.box').forEach((el) => el.remove());
  $('overlay').src = sel.overlay_url + '?t=' + Date.now();
  sel.hypotheses.forEach((h) => {
    const b = document.createElement('button');
    b.className = 'box';
    b.title = `segment ${h.index}`;
    Object.assign(b.style, {
      left: `${h.bbox.x_min}px`,
      top: `${h.bbox.y_min}px`,
      width: `${h.bbox.x_max - h.bbox.x_min + 1}px`,
      height: `${h.bbox.y_max - h.bbox.y_min + 1}px`,
    });
    b.addEventListener('click', () => {
      wrap.querySelectorAll('.box').forEach((el) => el.classList.remove('active'));
      b.classList.add('active');
      state.segment = h.index;
      busy(query);
    });
    wrap.append(b);
  });
  $('matches').replaceChildren();
  $('segments').hidden = false;
}

function bar(label, value, cls) {
  const wrap = document.createElement('div');
  const l = document.createElement('span');
  l.className = 'bar-label';
  l.textContent = `${label} ${value}`;
  const b = document.createElement('div');
  b.className = 'bar' + (cls ? ' ' + cls : '');
  b.style.width = `${Math.max(0, Math.min(1, value)) * 100}%`;
  wrap.append(l, b);
  return wrap;
}

async function query() {
  if (state.segment === null) return;
  const notice = $('results-notice');
  notice.hidden = true;
  const list = $('matches');
  list.replaceChildren();
  let r;
  try {
    r = await api('POST', `/api/sessions/${state.session}/segments/${state.segment}/query`, {
      wcf: Number($('wcf').value),
      wgf: Number($('wgf').value),
      top: 10,
    });
  } catch (e) {
    notice.textContent = e.status === 503 ? 'No glyph database loaded: ingest a database first.' : e.message;
    notice.hidden = false;
    return;
  }
  if (r.warnings.length) {
    notice.textContent = r.warnings.join(' ');
    notice.hidden = false;
  }
  r.matches.forEach((m) => {
    const li = document.createElement('li');
    const head = document.createElement('strong');
    head.textContent = `${m.label} (${m.glyph_id}) s_total ${m.s_total}`;
    li.append(head, bar('s_cnn', m.breakdown.s_cnn), bar('s_geo', m.breakdown.s_geo, 'geo'));
    list.append(li);
  });
}

for (const id of ['wcf', 'wgf']) {
  const input = $(id);
  const out = document.querySelector(`output[for=${id}]`);
  out.textContent = input.value;
  input.addEventListener('input', () => (out.textContent = input.value));
  input.addEventListener('change', () => busy(query));
}
$('file').addEventListener('change', (ev) => {
  const f = ev.target.files[0];
  if (f) busy(() => upload(f));
});
refreshHealth();
